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

#ifndef LFORGE_RDMODEL_H_
#define LFORGE_RDMODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lforge/bdrate.h"
#include "lforge/multiplier.h"

namespace lforge {

// Synthetic encoder with closed-form rate/quality behavior:
//
//   quality(qp)        = q_max - alpha * qp
//   log10 rate(qp, k)  = beta0 - beta1 * qp + g(k)
//   g(k) = sum_i gamma_i (ln k_i - ln k*_i)^2
//        + cross (ln k_1 - ln k*_1)(ln k_2 - ln k*_2)   [2-D only]
//
// g is a positive-definite quadratic in ln k centered at k*, so the optimal
// multipliers and the optimal BD-rate against the k=1 baseline are known in
// closed form. This is the test double the whole optimization pipeline is
// verified against.
struct SyntheticClipModel {
  std::string clip_id;
  double q_max = 0.995;
  double alpha = 0.003;   // quality loss per qp step, > 0
  double beta0 = 4.5;     // log10 kbps at qp 0
  double beta1 = 0.035;   // log10 kbps drop per qp step, > 0
  std::vector<double> k_star = {1.0};  // optimum, one entry per axis, > 0
  std::vector<double> gamma = {0.02};  // curvature weights, > 0
  double cross = 0.0;                  // off-diagonal coupling (2-D only)
  uint64_t noise_seed = 0;
  double noise_scale = 0.0;  // relative log-rate perturbation, <= 1e-3
  MetricId metric = MetricId::kMsSsim;

  int dimension() const { return static_cast<int>(k_star.size()); }
};

constexpr int kSyntheticQpMin = 1;
constexpr int kSyntheticQpMax = 63;

// Errors: ConfigError when the quadratic form is not positive-definite or a
// generated curve would violate rate/quality invariants over qp [1, 63].
void validate_model(const SyntheticClipModel& model);

// Quadratic penalty g at multiplier vector k; zero exactly at k = k_star.
double model_log_rate_offset(const SyntheticClipModel& model,
                             std::span<const double> k);

// One deterministic synthetic encode. Errors: OutOfRange (qp),
// DimensionMismatch (k length vs model), DomainError (k <= 0).
RDPoint synthetic_encode(const SyntheticClipModel& model, int qp,
                         const MultiplierAssignment& k);

// BD-rate of the optimum against the k = 1 baseline:
// (10^(-g(1)) - 1) * 100. Exact when noise is off.
double analytic_optimal_bdrate(const SyntheticClipModel& model);

// Empirical lambda-vs-quantizer relationship of the encoder:
// lambda = q_dc^2 * (A + 0.0035 * q_index), with q_dc from a monotone
// 256-entry lookup table.
struct LambdaModel {
  double frame_type_constant = 3.2;  // A, in [3.2, 3.3] by frame type
  std::vector<double> dc_table;      // q_index -> q_dc, 256 entries

  // Affine placeholder table q_dc = 4 + 0.168 * q_index. Not the table any
  // production encoder ships; inject a real dump for encoder-true values.
  static LambdaModel with_default_table(double frame_type_constant = 3.2);
};

void validate_lambda_model(const LambdaModel& model);

// Errors: OutOfRange for q_index outside [0, 255].
double default_lambda(const LambdaModel& model, int q_index);

}  // namespace lforge

#endif  // LFORGE_RDMODEL_H_
