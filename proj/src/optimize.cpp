// Copyright 2026 The catdiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catdiv/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catdiv/error.hpp"

namespace catdiv::optimize {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Run {
  Vec x;
  double f = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Projected gradient: zero for coordinates pinned at a bound with the gradient
// pointing out of the box.
Vec projected(const Vec& x, const Vec& g, const BoxOptions& o) {
  Vec pg(g);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((x[i] <= o.lower && g[i] < 0.0) || (x[i] >= o.upper && g[i] > 0.0)) pg[i] = 0.0;
  }
  return pg;
}

Run ascend(const Objective& f, Vec x, const BoxOptions& o) {
  const std::size_t d = x.size();
  for (auto& v : x) v = std::clamp(v, o.lower, o.upper);
  Vec g(d);
  Run run;
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw DomainError("maximize_in_box: objective not finite at start");

  // Inverse-Hessian approximation of -f, row-major.
  Vec h(d * d, 0.0);
  auto reset = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) h[i * d + i] = 1.0;
  };
  reset();

  Vec g_new(d);
  for (run.iterations = 0; run.iterations < o.max_iterations; ++run.iterations) {
    const Vec pg = projected(x, g, o);
    double gmax = 0.0;
    for (double v : pg) gmax = std::max(gmax, std::abs(v));
    if (gmax <= o.gradient_tolerance * std::max(1.0, std::abs(fx))) {
      run.converged = true;
      break;
    }

    Vec dir(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (pg[i] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        if (pg[j] != 0.0) dir[i] += h[i * d + j] * pg[j];
      }
    }
    if (dot(dir, pg) <= 0.0) {
      reset();
      dir = pg;
    }
    double dmax = 0.0;
    for (double v : dir) dmax = std::max(dmax, std::abs(v));
    if (dmax > o.max_step) {
      for (auto& v : dir) v *= o.max_step / dmax;
    }

    // Armijo backtracking along the projected path.
    double t = 1.0;
    Vec x_new(d);
    double f_new = fx;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < d; ++i) x_new[i] = std::clamp(x[i] + t * dir[i], o.lower, o.upper);
      f_new = f(x_new, g_new);
      double gain = 0.0;
      for (std::size_t i = 0; i < d; ++i) gain += pg[i] * (x_new[i] - x[i]);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * gain) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No ascent possible at working precision: treat as stationary.
      run.converged = gmax <= 1e-5 * std::max(1.0, std::abs(fx));
      break;
    }

    Vec s(d);
    Vec y(d);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g[i] - g_new[i];  // gradient change of -f
    }
    const double sy = dot(s, y);
    const double f_old = fx;
    x = x_new;
    fx = f_new;
    g = g_new;

    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      Vec hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) hy[i] += h[i * d + j] * y[j];
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          h[i * d + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    } else {
      reset();
    }

    double smax = 0.0;
    for (double v : s) smax = std::max(smax, std::abs(v));
    if (smax < 1e-14 && std::abs(fx - f_old) <= 1e-15 * std::max(1.0, std::abs(fx))) {
      run.converged = gmax <= 1e-5 * std::max(1.0, std::abs(fx));
      break;
    }
  }
  run.x = std::move(x);
  run.f = fx;
  return run;
}

// Newton iterations on the gradient with a central-difference Jacobian.
void polish(const Objective& f, Run& run, const BoxOptions& o) {
  const std::size_t d = run.x.size();
  const double step = 1e-4;
  Vec g(d);
  Vec gp(d);
  Vec gm(d);
  auto gmax_of = [](const Vec& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  f(run.x, g);
  for (int it = 0; it < 8; ++it) {
    const double gmax = gmax_of(g);
    if (gmax == 0.0) return;
    Vec jac(d * d);
    Vec p = run.x;
    for (std::size_t j = 0; j < d; ++j) {
      if (p[j] - step < o.lower || p[j] + step > o.upper) return;
      p[j] = run.x[j] + step;
      f(p, gp);
      p[j] = run.x[j] - step;
      f(p, gm);
      p[j] = run.x[j];
      for (std::size_t i = 0; i < d; ++i) jac[i * d + j] = (gp[i] - gm[i]) / (2.0 * step);
    }
    // Solve jac * delta = -g by Gaussian elimination with partial pivoting.
    Vec a = jac;
    Vec b(d);
    for (std::size_t i = 0; i < d; ++i) b[i] = -g[i];
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < d; ++r) {
        if (std::abs(a[r * d + c]) > std::abs(a[piv * d + c])) piv = r;
      }
      if (a[piv * d + c] == 0.0) return;
      if (piv != c) {
        for (std::size_t k = 0; k < d; ++k) std::swap(a[c * d + k], a[piv * d + k]);
        std::swap(b[c], b[piv]);
      }
      for (std::size_t r = c + 1; r < d; ++r) {
        const double m = a[r * d + c] / a[c * d + c];
        for (std::size_t k = c; k < d; ++k) a[r * d + k] -= m * a[c * d + k];
        b[r] -= m * b[c];
      }
    }
    Vec delta(d);
    for (std::size_t c = d; c-- > 0;) {
      double v = b[c];
      for (std::size_t k = c + 1; k < d; ++k) v -= a[c * d + k] * delta[k];
      delta[c] = v / a[c * d + c];
    }
    // Only ascent directions toward a nearby stationary point are taken.
    if (dot(delta, g) <= 0.0 || gmax_of(delta) > 0.1) return;
    Vec x_new(d);
    for (std::size_t i = 0; i < d; ++i) {
      x_new[i] = run.x[i] + delta[i];
      if (x_new[i] <= o.lower || x_new[i] >= o.upper) return;
    }
    Vec g_new(d);
    const double f_new = f(x_new, g_new);
    if (!std::isfinite(f_new) || gmax_of(g_new) >= gmax ||
        f_new < run.f - 1e-12 * std::max(1.0, std::abs(run.f))) {
      return;
    }
    run.x = x_new;
    run.f = f_new;
    g = g_new;
  }
}

}  // namespace

BoxMaximum maximize_in_box(const Objective& f, std::span<const std::vector<double>> starts,
                           const BoxOptions& options) {
  if (starts.empty()) throw DomainError("maximize_in_box: no start points");
  if (!(options.lower < options.upper)) throw DomainError("maximize_in_box: empty box");
  Run best;
  bool have = false;
  for (const auto& s : starts) {
    Run r = ascend(f, s, options);
    if (!have || r.f > best.f) {
      best = std::move(r);
      have = true;
    }
  }
  polish(f, best, options);
  BoxMaximum out;
  out.value = best.f;
  out.converged = best.converged;
  out.iterations = best.iterations;
  const double edge = 1e-6 * (options.upper - options.lower);
  for (double v : best.x) {
    out.at_lower.push_back(v <= options.lower + edge);
    out.at_upper.push_back(v >= options.upper - edge);
  }
  out.point = std::move(best.x);
  return out;
}

std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double step) {
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = p[i];
    p[i] = xi + step;
    const double fp = f(p);
    p[i] = xi - step;
    const double fm = f(p);
    p[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

std::vector<double> central_hessian(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> x, double step) {
  const std::size_t d = x.size();
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> h(d * d);
  const double f0 = f(p);
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = p[i];
    p[i] = xi + step;
    const double fp = f(p);
    p[i] = xi - step;
    const double fm = f(p);
    p[i] = xi;
    h[i * d + i] = (fp - 2.0 * f0 + fm) / (step * step);
    for (std::size_t j = i + 1; j < d; ++j) {
      const double xj = p[j];
      auto at = [&](double si, double sj) {
        p[i] = xi + si * step;
        p[j] = xj + sj * step;
        const double v = f(p);
        p[i] = xi;
        p[j] = xj;
        return v;
      };
      const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step * step);
      h[i * d + j] = v;
      h[j * d + i] = v;
    }
  }
  return h;
}

}  // namespace catdiv::optimize
