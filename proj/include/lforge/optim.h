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

#ifndef LFORGE_OPTIM_H_
#define LFORGE_OPTIM_H_

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "lforge/error.h"

namespace lforge {

struct Bounds {
  double low = 0.0;
  double high = 0.0;
};

void validate_bounds(const Bounds& b);

struct OptimizerConfig {
  double x_tolerance = 1e-3;
  double f_tolerance = 1e-4;  // in cost units (BD-rate percentage points)
  int max_iterations = 100;
  int max_cost_evals = 200;
};

void validate_optimizer_config(const OptimizerConfig& cfg);

enum class StopReason { kConverged, kIterationLimit, kEvalBudget };

struct Evaluation {
  std::vector<double> point;
  double cost = 0.0;
};

struct OptimizerTrace {
  std::vector<Evaluation> evaluations;
  int iterations_used = 0;
  bool converged = false;
  StopReason stop = StopReason::kIterationLimit;
  std::vector<double> best_point;
  double best_cost = std::numeric_limits<double>::infinity();
};

using ScalarCost = std::function<double(double)>;
using VectorCost = std::function<double(const std::vector<double>&)>;

// Raised when the cost callable itself fails; carries every evaluation made
// before the failure.
class CostFailure : public Error {
 public:
  CostFailure(const std::string& message, OptimizerTrace partial);
  const OptimizerTrace& partial_trace() const { return trace_; }

 private:
  OptimizerTrace trace_;
};

// Bounded scalar minimizers. Both probe the two bounds and an interior point
// first, so the result is never worse than any of those three. Exhausting
// max_cost_evals is not an error: the trace comes back with converged=false
// and stop=kEvalBudget.
OptimizerTrace brent_minimize(const ScalarCost& cost, const Bounds& bounds,
                              const OptimizerConfig& cfg);
OptimizerTrace golden_section(const ScalarCost& cost, const Bounds& bounds,
                              const OptimizerConfig& cfg);

// Direction-set minimizer with Powell's replacement rule. Line searches run
// bounded Brent along each direction, restricted to the box; their tolerance
// is 10x the outer x_tolerance since each evaluation is an encode batch.
OptimizerTrace powell_minimize(const VectorCost& cost,
                               std::vector<double> start,
                               const std::vector<Bounds>& bounds,
                               const OptimizerConfig& cfg);

struct GridAxis {
  double low = 0.0;
  double high = 0.0;
  double step = 0.1;
};

// Lattice values low, low+step, ... (endpoint included when the range is an
// integral number of steps, within rounding).
std::vector<double> grid_axis_values(const GridAxis& axis);

struct GridScan {
  std::vector<GridAxis> axes;
  std::vector<int> counts;                  // lattice size per axis
  std::vector<std::vector<double>> points;  // row-major, axis 0 slowest
  std::vector<double> costs;
};

// Exhaustive scan of the full Cartesian lattice. Ties at the minimum go to
// the lexicographically smallest point.
std::pair<OptimizerTrace, GridScan> grid_search(const VectorCost& cost,
                                                const std::vector<GridAxis>& axes);

}  // namespace lforge

#endif  // LFORGE_OPTIM_H_
