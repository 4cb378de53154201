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

#include "lforge/rdmodel.h"

#include <bit>
#include <cmath>

#include "lforge/util.h"

namespace lforge {

void validate_model(const SyntheticClipModel& model) {
  int dim = model.dimension();
  if (dim < 1 || dim > 2 || model.gamma.size() != model.k_star.size()) {
    raise(Errc::kConfigError,
          model.clip_id + ": k_star and gamma must both have 1 or 2 entries");
  }
  for (double k : model.k_star) {
    if (!(k > 0.0)) raise(Errc::kConfigError, model.clip_id + ": k_star <= 0");
  }
  for (double g : model.gamma) {
    if (!(g > 0.0)) raise(Errc::kConfigError, model.clip_id + ": gamma <= 0");
  }
  if (dim == 1 && model.cross != 0.0) {
    raise(Errc::kConfigError, model.clip_id + ": cross term requires 2 axes");
  }
  if (dim == 2) {
    // g1 u^2 + g2 v^2 + c u v is positive-definite iff c^2 < 4 g1 g2.
    if (!(model.cross * model.cross < 4.0 * model.gamma[0] * model.gamma[1])) {
      raise(Errc::kConfigError,
            model.clip_id + ": quadratic form not positive-definite");
    }
  }
  if (!(model.alpha > 0.0) || !(model.beta1 > 0.0)) {
    raise(Errc::kConfigError, model.clip_id + ": alpha and beta1 must be > 0");
  }
  if (!(model.noise_scale >= 0.0) || model.noise_scale > 1e-3) {
    raise(Errc::kConfigError,
          model.clip_id + ": noise_scale outside [0, 1e-3]");
  }
  if (model.metric == MetricId::kMsSsim) {
    double q_lo = model.q_max - model.alpha * kSyntheticQpMax;
    if (!(q_lo > 0.0) || !(model.q_max <= 1.0)) {
      raise(Errc::kConfigError,
            model.clip_id + ": MS-SSIM quality leaves (0, 1] over qp range");
    }
  }
}

double model_log_rate_offset(const SyntheticClipModel& model,
                             std::span<const double> k) {
  if (k.size() != model.k_star.size()) {
    raise(Errc::kDimensionMismatch,
          model.clip_id + ": got " + std::to_string(k.size()) +
              " multipliers for a " + std::to_string(model.dimension()) +
              "-D model");
  }
  double g = 0.0;
  double u0 = 0.0;
  for (size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0)) {
      raise(Errc::kDomainError, model.clip_id + ": multiplier <= 0");
    }
    double u = std::log(k[i]) - std::log(model.k_star[i]);
    g += model.gamma[i] * u * u;
    if (i == 0) u0 = u;
    if (i == 1) g += model.cross * u0 * u;
  }
  return g;
}

namespace {

// Deterministic perturbation in [-1, 1] keyed on (seed, qp, k bits).
double noise_unit(const SyntheticClipModel& model, int qp,
                  std::span<const double> k) {
  uint64_t h = splitmix64(model.noise_seed ^ static_cast<uint64_t>(qp));
  for (double v : k) {
    h = splitmix64(h ^ std::bit_cast<uint64_t>(v));
  }
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

RDPoint synthetic_encode(const SyntheticClipModel& model, int qp,
                         const MultiplierAssignment& k) {
  if (qp < kSyntheticQpMin || qp > kSyntheticQpMax) {
    raise(Errc::kOutOfRange, model.clip_id + ": qp " + std::to_string(qp) +
                                 " outside [" +
                                 std::to_string(kSyntheticQpMin) + ", " +
                                 std::to_string(kSyntheticQpMax) + "]");
  }
  double g = model_log_rate_offset(model, k.values);
  double log_rate = model.beta0 - model.beta1 * qp + g;
  if (model.noise_scale > 0.0) {
    log_rate *= 1.0 + model.noise_scale * noise_unit(model, qp, k.values);
  }
  RDPoint p;
  p.qp = qp;
  p.bitrate_kbps = std::pow(10.0, log_rate);
  p.quality = model.q_max - model.alpha * qp;
  p.metric = model.metric;
  return p;
}

double analytic_optimal_bdrate(const SyntheticClipModel& model) {
  std::vector<double> ones(model.k_star.size(), 1.0);
  double g1 = model_log_rate_offset(model, ones);
  return (std::pow(10.0, -g1) - 1.0) * 100.0;
}

LambdaModel LambdaModel::with_default_table(double frame_type_constant) {
  LambdaModel m;
  m.frame_type_constant = frame_type_constant;
  m.dc_table.resize(256);
  for (int i = 0; i < 256; ++i) {
    m.dc_table[i] = 4.0 + 0.168 * i;
  }
  return m;
}

void validate_lambda_model(const LambdaModel& model) {
  if (model.frame_type_constant < 3.2 || model.frame_type_constant > 3.3) {
    raise(Errc::kConfigError, "frame type constant outside [3.2, 3.3]");
  }
  if (model.dc_table.size() != 256) {
    raise(Errc::kConfigError, "dc_table must have 256 entries");
  }
  double prev = 0.0;
  for (double v : model.dc_table) {
    if (!(v > 0.0) || v < prev) {
      raise(Errc::kConfigError, "dc_table must be positive and nondecreasing");
    }
    prev = v;
  }
}

double default_lambda(const LambdaModel& model, int q_index) {
  if (q_index < 0 || q_index > 255) {
    raise(Errc::kOutOfRange,
          "quantizer index " + std::to_string(q_index) + " outside [0, 255]");
  }
  double q_dc = model.dc_table.at(static_cast<size_t>(q_index));
  return q_dc * q_dc *
         (model.frame_type_constant + 0.0035 * static_cast<double>(q_index));
}

}  // namespace lforge
