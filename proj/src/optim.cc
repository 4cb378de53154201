// Copyright (c) the lforge Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lforge/optim.h"

#include <algorithm>
#include <cmath>

#include "lforge/util.h"

namespace lforge {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi
constexpr double kTiny = 1e-25;

// Thrown internally when max_cost_evals would be exceeded; callers translate
// it into a best-so-far trace.
struct BudgetSignal {};

class Evaluator {
 public:
  Evaluator(VectorCost cost, int max_evals)
      : cost_(std::move(cost)), max_evals_(max_evals) {}

  double operator()(const std::vector<double>& x) {
    if (static_cast<int>(trace_.evaluations.size()) >= max_evals_) {
      throw BudgetSignal{};
    }
    double c;
    try {
      c = cost_(x);
    } catch (const std::exception& e) {
      throw CostFailure(e.what(), finish(false, StopReason::kIterationLimit));
    }
    trace_.evaluations.push_back({x, c});
    if (c < trace_.best_cost) {
      trace_.best_cost = c;
      trace_.best_point = x;
    }
    return c;
  }

  int evals() const { return static_cast<int>(trace_.evaluations.size()); }

  OptimizerTrace finish(bool converged, StopReason stop) {
    trace_.converged = converged;
    trace_.stop = stop;
    return trace_;
  }

  void set_iterations(int n) { trace_.iterations_used = n; }

 private:
  VectorCost cost_;
  int max_evals_;
  OptimizerTrace trace_;
};

// Core of the bounded Brent loop over f restricted to [a, b]. Assumes fx is
// the cost at the interior start point x. Returns true if the bracket shrank
// below xtol before the iteration cap.
bool brent_core(const std::function<double(double)>& f, double a, double b,
                double x, double fx, double xtol, int max_iter, double* out_x,
                double* out_fx, int* iters_used) {
  double w = x, v = x, fw = fx, fv = fx;
  double delta = 0.0, delta_prev = 0.0;
  bool converged = false;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double mid = 0.5 * (a + b);
    // Termination leaves the bracket no wider than xtol.
    double tol1 = std::max(0.25 * xtol, 3e-16 * std::abs(x)) + kTiny;
    double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
      converged = true;
      break;
    }
    if (std::abs(delta_prev) > tol1) {
      // Parabola through (x, w, v).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double prev = delta_prev;
      delta_prev = delta;
      if (std::abs(p) >= std::abs(0.5 * q * prev) || p <= q * (a - x) ||
          p >= q * (b - x)) {
        delta_prev = (x >= mid) ? a - x : b - x;
        delta = kGolden * delta_prev;
      } else {
        delta = p / q;
        double u = x + delta;
        if (u - a < tol2 || b - u < tol2) {
          delta = (mid - x >= 0.0) ? tol1 : -tol1;
        }
      }
    } else {
      delta_prev = (x >= mid) ? a - x : b - x;
      delta = kGolden * delta_prev;
    }
    double u = (std::abs(delta) >= tol1)
                   ? x + delta
                   : x + ((delta >= 0.0) ? tol1 : -tol1);
    double fu = f(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  *out_x = x;
  *out_fx = fx;
  if (iters_used) *iters_used = iter;
  return converged;
}

VectorCost wrap_scalar(const ScalarCost& cost) {
  return [&cost](const std::vector<double>& x) { return cost(x[0]); };
}

OptimizerTrace run_scalar(const ScalarCost& cost, const Bounds& bounds,
                          const OptimizerConfig& cfg, bool use_brent) {
  validate_bounds(bounds);
  validate_optimizer_config(cfg);
  Evaluator ev(wrap_scalar(cost), cfg.max_cost_evals);
  auto f = [&ev](double t) { return ev(std::vector<double>{t}); };
  try {
    // Probe both bounds so a boundary minimum is never missed.
    f(bounds.low);
    f(bounds.high);
    bool converged = false;
    int iters = 0;
    if (use_brent) {
      double x = bounds.low + kGolden * (bounds.high - bounds.low);
      double fx = f(x);
      double bx, bfx;
      converged = brent_core(f, bounds.low, bounds.high, x, fx,
                             cfg.x_tolerance, cfg.max_iterations, &bx, &bfx,
                             &iters);
    } else {
      double a = bounds.low, b = bounds.high;
      double x1 = a + kGolden * (b - a);
      double x2 = b - kGolden * (b - a);
      double f1 = f(x1), f2 = f(x2);
      for (; iters < cfg.max_iterations; ++iters) {
        if (b - a <= cfg.x_tolerance) {
          converged = true;
          break;
        }
        if (f1 < f2) {
          b = x2; x2 = x1; f2 = f1;
          x1 = a + kGolden * (b - a);
          f1 = f(x1);
        } else {
          a = x1; x1 = x2; f1 = f2;
          x2 = b - kGolden * (b - a);
          f2 = f(x2);
        }
      }
      if (!converged && b - a <= cfg.x_tolerance) converged = true;
    }
    ev.set_iterations(iters);
    return ev.finish(converged,
                     converged ? StopReason::kConverged
                               : StopReason::kIterationLimit);
  } catch (const BudgetSignal&) {
    return ev.finish(false, StopReason::kEvalBudget);
  }
}

}  // namespace

void validate_bounds(const Bounds& b) {
  if (!(b.low < b.high)) {
    raise(Errc::kDomainError, "bounds low " + fmt_double(b.low) +
                                  " must be below high " + fmt_double(b.high));
  }
}

void validate_optimizer_config(const OptimizerConfig& cfg) {
  if (!(cfg.x_tolerance > 0.0) || !(cfg.f_tolerance >= 0.0) ||
      cfg.max_iterations < 1 || cfg.max_cost_evals < 1) {
    raise(Errc::kConfigError, "invalid optimizer config");
  }
}

CostFailure::CostFailure(const std::string& message, OptimizerTrace partial)
    : Error(Errc::kCostFailure, message), trace_(std::move(partial)) {}

OptimizerTrace brent_minimize(const ScalarCost& cost, const Bounds& bounds,
                              const OptimizerConfig& cfg) {
  return run_scalar(cost, bounds, cfg, /*use_brent=*/true);
}

OptimizerTrace golden_section(const ScalarCost& cost, const Bounds& bounds,
                              const OptimizerConfig& cfg) {
  return run_scalar(cost, bounds, cfg, /*use_brent=*/false);
}

OptimizerTrace powell_minimize(const VectorCost& cost,
                               std::vector<double> start,
                               const std::vector<Bounds>& bounds,
                               const OptimizerConfig& cfg) {
  size_t n = start.size();
  if (n < 1 || bounds.size() != n) {
    raise(Errc::kDimensionMismatch,
          "start has dimension " + std::to_string(n) + ", bounds " +
              std::to_string(bounds.size()));
  }
  validate_optimizer_config(cfg);
  for (size_t i = 0; i < n; ++i) {
    validate_bounds(bounds[i]);
    if (start[i] < bounds[i].low || start[i] > bounds[i].high) {
      raise(Errc::kOutOfRange, "start point outside bounds on axis " +
                                   std::to_string(i));
    }
  }

  Evaluator ev(cost, cfg.max_cost_evals);
  const double line_tol = 10.0 * cfg.x_tolerance;
  // cfg.max_iterations caps the outer direction-set sweeps; inner line
  // searches get their own cap and are bounded by the shared eval budget.
  const int line_max_iter = 100;

  // Minimizes along p + t*dir (unit dir), t restricted to the box. Returns
  // the cost at the new p.
  auto line_minimize = [&](std::vector<double>& p, std::vector<double> dir,
                           double fp) -> double {
    double norm = 0.0;
    for (double d : dir) norm += d * d;
    norm = std::sqrt(norm);
    if (norm < kTiny) return fp;
    for (double& d : dir) d /= norm;
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      if (std::abs(dir[i]) < kTiny) continue;
      double t1 = (bounds[i].low - p[i]) / dir[i];
      double t2 = (bounds[i].high - p[i]) / dir[i];
      tlo = std::max(tlo, std::min(t1, t2));
      thi = std::min(thi, std::max(t1, t2));
    }
    if (!(thi - tlo > kTiny)) return fp;
    auto f1 = [&](double t) {
      std::vector<double> x(n);
      for (size_t i = 0; i < n; ++i) {
        x[i] = std::clamp(p[i] + t * dir[i], bounds[i].low, bounds[i].high);
      }
      return ev(x);
    };
    // t = 0 is the current point; reuse fp for it via the bracket start.
    double t0 = std::clamp(0.0, tlo, thi);
    double bx, bfx;
    brent_core(f1, tlo, thi, t0, fp, line_tol, line_max_iter, &bx, &bfx,
               nullptr);
    if (bfx < fp) {
      for (size_t i = 0; i < n; ++i) {
        p[i] = std::clamp(p[i] + bx * dir[i], bounds[i].low, bounds[i].high);
      }
      return bfx;
    }
    return fp;
  };

  try {
    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;

    std::vector<double> p = start;
    double fp = ev(p);
    bool converged = false;
    int iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
      std::vector<double> p_prev = p;
      double f_prev = fp;
      size_t big_dir = 0;
      double big_drop = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double before = fp;
        fp = line_minimize(p, dirs[i], fp);
        if (before - fp > big_drop) {
          big_drop = before - fp;
          big_dir = i;
        }
      }
      double movement = 0.0;
      for (size_t i = 0; i < n; ++i) {
        movement = std::max(movement, std::abs(p[i] - p_prev[i]));
      }
      if (f_prev - fp <= cfg.f_tolerance || movement <= cfg.x_tolerance) {
        converged = true;
        ++iter;
        break;
      }
      // Powell's replacement rule: try the extrapolated point along the
      // average direction of travel; if promising, minimize along it and
      // retire the direction of largest decrease.
      std::vector<double> extrap(n), travel(n);
      bool inside = true;
      for (size_t i = 0; i < n; ++i) {
        extrap[i] = 2.0 * p[i] - p_prev[i];
        travel[i] = p[i] - p_prev[i];
        if (extrap[i] < bounds[i].low || extrap[i] > bounds[i].high) {
          inside = false;
        }
      }
      if (inside) {
        double fe = ev(extrap);
        if (fe < f_prev) {
          double t = 2.0 * (f_prev - 2.0 * fp + fe) *
                         (f_prev - fp - big_drop) * (f_prev - fp - big_drop) -
                     big_drop * (f_prev - fe) * (f_prev - fe);
          if (t < 0.0) {
            fp = line_minimize(p, travel, fp);
            dirs[big_dir] = dirs[n - 1];
            dirs[n - 1] = travel;
          }
        }
      }
    }
    ev.set_iterations(iter);
    return ev.finish(converged,
                     converged ? StopReason::kConverged
                               : StopReason::kIterationLimit);
  } catch (const BudgetSignal&) {
    return ev.finish(false, StopReason::kEvalBudget);
  }
}

std::vector<double> grid_axis_values(const GridAxis& axis) {
  if (!(axis.step > 0.0)) {
    raise(Errc::kDomainError, "grid step must be positive");
  }
  if (axis.low > axis.high) {
    raise(Errc::kDomainError, "grid axis low above high");
  }
  double span = axis.high - axis.low;
  int count = static_cast<int>(std::floor(span / axis.step + 1e-9)) + 1;
  std::vector<double> values(count);
  for (int j = 0; j < count; ++j) {
    values[j] = axis.low + j * axis.step;
  }
  return values;
}

std::pair<OptimizerTrace, GridScan> grid_search(
    const VectorCost& cost, const std::vector<GridAxis>& axes) {
  if (axes.empty()) raise(Errc::kDimensionMismatch, "grid needs >= 1 axis");
  GridScan scan;
  scan.axes = axes;
  std::vector<std::vector<double>> lattice;
  size_t total = 1;
  for (const GridAxis& a : axes) {
    lattice.push_back(grid_axis_values(a));
    scan.counts.push_back(static_cast<int>(lattice.back().size()));
    total *= lattice.back().size();
  }
  Evaluator ev(cost, std::numeric_limits<int>::max());
  scan.points.reserve(total);
  scan.costs.reserve(total);
  std::vector<size_t> idx(axes.size(), 0);
  // Row-major with axis 0 slowest visits points in ascending lexicographic
  // order, so "first strict minimum" is the lexicographic tie-break.
  for (size_t flat = 0; flat < total; ++flat) {
    std::vector<double> point(axes.size());
    for (size_t d = 0; d < axes.size(); ++d) point[d] = lattice[d][idx[d]];
    double c = ev(point);
    scan.points.push_back(std::move(point));
    scan.costs.push_back(c);
    for (size_t d = axes.size(); d-- > 0;) {
      if (++idx[d] < lattice[d].size()) break;
      idx[d] = 0;
    }
  }
  // Evaluator keeps the first strict improvement, which in visit order is the
  // lexicographically smallest argmin.
  ev.set_iterations(1);
  OptimizerTrace trace = ev.finish(true, StopReason::kConverged);
  return {std::move(trace), std::move(scan)};
}

}  // namespace lforge
