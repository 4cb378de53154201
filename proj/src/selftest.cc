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

#include "lforge/selftest.h"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "lforge/corpus.h"
#include "lforge/orchestrator.h"
#include "lforge/reporting.h"
#include "lforge/util.h"
#include "lforge/y4m.h"

namespace lforge::selftest {

namespace fs = std::filesystem;

namespace {

struct TempDir {
  std::string path;
  explicit TempDir(const std::string& tag) {
    path = (fs::temp_directory_path() /
            ("lforge-selftest-" + tag + "-" + std::to_string(::getpid())))
               .string();
    fs::remove_all(path);
    ensure_dir(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random strictly-monotone 5-point curve: qualities ascend in steps of
// [0.02, 0.03] (staying below MS-SSIM 1.0), log10 bitrates in steps of
// [step_lo, step_hi].
RDCurve random_curve(std::mt19937_64& rng, double base_quality,
                     double step_lo = 0.08, double step_hi = 0.2) {
  static const int kQps[5] = {63, 59, 49, 39, 27};
  double q = base_quality;
  double lr = uniform(rng, 2.5, 3.2);
  std::vector<RDPoint> pts;
  for (int i = 0; i < 5; ++i) {
    pts.push_back({kQps[i], std::pow(10.0, lr), q, MetricId::kMsSsim});
    q += uniform(rng, 0.02, 0.03);
    lr += uniform(rng, step_lo, step_hi);
  }
  return build_curve("rand", std::move(pts));
}

// Mean of (log-rate difference) by composite trapezoid over the overlap; the
// quadrature route the closed-form integration is checked against.
double trapezoid_mean_diff(const RDCurve& test, const RDCurve& ref, int n) {
  double q1 = std::max(test.min_quality(), ref.min_quality());
  double q2 = std::min(test.max_quality(), ref.max_quality());
  double h = (q2 - q1) / n;
  auto f = [&](double q) {
    return interpolate_log_rate(test, q) - interpolate_log_rate(ref, q);
  };
  double sum = 0.5 * (f(q1) + f(q2));
  for (int i = 1; i < n; ++i) sum += f(q1 + i * h);
  return sum * h / (q2 - q1);
}

SyntheticClipModel make_1d_model(const std::string& id, double gamma,
                                 double k_star) {
  SyntheticClipModel m;
  m.clip_id = id;
  m.q_max = 0.995;
  m.alpha = 0.003;
  m.beta0 = 4.2;
  m.beta1 = 0.04;
  m.k_star = {k_star};
  m.gamma = {gamma};
  validate_model(m);
  return m;
}

SyntheticClipModel make_2d_model(const std::string& id, double g1, double g2,
                                 double k1, double k2, double rho) {
  SyntheticClipModel m;
  m.clip_id = id;
  m.q_max = 0.995;
  m.alpha = 0.003;
  m.beta0 = 4.2;
  m.beta1 = 0.04;
  m.k_star = {k1, k2};
  m.gamma = {g1, g2};
  m.cross = rho * 2.0 * std::sqrt(g1 * g2);
  validate_model(m);
  return m;
}

CampaignConfig synthetic_config(const std::string& scratch) {
  CampaignConfig cfg;
  cfg.backend.type = "synthetic";
  ProxyProfile fast{"syn-fast", 0, 0, 6, DownscaleFilter::kLanczos5};
  ProxyProfile full{"syn-final", 0, 0, 2, DownscaleFilter::kLanczos5};
  cfg.profiles = {{fast.label, fast}, {full.label, full}};
  cfg.search_profile = fast.label;
  cfg.final_profile = full.label;
  cfg.modes = {ModeKind::kAllFrames};
  cfg.pool_size = 4;
  cfg.scratch_dir = scratch;
  cfg.cache_dir = join_path(scratch, "cache");
  cfg.store_path = join_path(scratch, "records.jsonl");
  return cfg;
}

struct SyntheticRun {
  std::shared_ptr<SyntheticBackend> synthetic;
  std::shared_ptr<CachedBackend> backend;
  std::unique_ptr<Orchestrator> orchestrator;
  CampaignConfig config;
};

SyntheticRun make_synthetic_run(const std::string& scratch,
                                std::vector<SyntheticClipModel> models,
                                std::vector<ModeKind> modes,
                                Bounds k_bounds = Bounds{0.2, 8.0}) {
  SyntheticRun run;
  run.config = synthetic_config(scratch);
  run.config.modes = std::move(modes);
  run.config.k_bounds = k_bounds;
  run.synthetic = std::make_shared<SyntheticBackend>();
  std::vector<ManifestEntry> manifest;
  for (SyntheticClipModel& m : models) {
    ManifestEntry e;
    e.clip_id = m.clip_id;
    e.shot_group = m.dimension() == 1 ? "Synthetic1D" : "Synthetic2D";
    e.model = m;
    manifest.push_back(e);
    run.synthetic->register_model(std::move(m));
  }
  // Synthetic encodes are microseconds; an in-memory cache keeps the suite
  // from grinding through tens of thousands of tiny files.
  run.backend = std::make_shared<CachedBackend>(run.synthetic, "");
  run.orchestrator = std::make_unique<Orchestrator>(
      run.config, run.backend, std::move(manifest), nullptr);
  return run;
}

std::string check(bool ok, const std::string& label, std::string& detail) {
  if (!ok && detail.size() < 600) {
    detail += (detail.empty() ? "" : "; ") + label;
  }
  return detail;
}

// --------------------------------------------------------------------------
// Criterion 1: closed-form BD-rate integration matches dense trapezoidal
// quadrature to 1e-6 percentage points over 1000 random curve pairs.
CriterionResult criterion_bdrate_oracle() {
  CriterionResult r{1, "bd_rate matches dense trapezoidal quadrature", false, "", 0};
  std::mt19937_64 rng(20240217);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double base = uniform(rng, 0.78, 0.84);
    RDCurve ref = random_curve(rng, base);
    RDCurve test = random_curve(rng, base + uniform(rng, -0.01, 0.01));
    double value = bd_rate(test, ref).value_percent;
    double d = trapezoid_mean_diff(test, ref, 100000);
    double oracle = (std::pow(10.0, d) - 1.0) * 100.0;
    worst = std::max(worst, std::abs(value - oracle));
  }
  r.passed = worst <= 1e-6;
  r.detail = "max |closed-form - quadrature| = " + fmt_double(worst);
  return r;
}

// --------------------------------------------------------------------------
// Criterion 2: scaling bitrates by 1.10 gives exactly +10%, and
// bd_rate(c, c) = 0, over random curves.
CriterionResult criterion_scale_and_zero_law() {
  CriterionResult r{2, "BD-rate scale law and zero law", false, "", 0};
  std::mt19937_64 rng(7041776);
  double worst_scale = 0.0, worst_zero = 0.0;
  for (int i = 0; i < 100; ++i) {
    RDCurve ref = random_curve(rng, uniform(rng, 0.78, 0.84));
    std::vector<RDPoint> scaled(ref.points().begin(), ref.points().end());
    for (RDPoint& p : scaled) p.bitrate_kbps *= 1.10;
    RDCurve test = build_curve("scaled", std::move(scaled));
    worst_scale = std::max(
        worst_scale, std::abs(bd_rate(test, ref).value_percent - 10.0));
    worst_zero = std::max(worst_zero,
                          std::abs(bd_rate(ref, ref).value_percent));
  }
  r.passed = worst_scale < 1e-9 && worst_zero < 1e-9;
  r.detail = "scale err " + fmt_double(worst_scale) + ", zero err " +
             fmt_double(worst_zero);
  return r;
}

// --------------------------------------------------------------------------
// Criterion 3: Brent through the full cost path recovers k* of random 1-D
// models to 1e-3 with <= 30 cost evaluations each.
CriterionResult criterion_brent_convergence() {
  CriterionResult r{3, "Brent recovers 1-D synthetic optima", false, "", 0};
  std::mt19937_64 rng(90125);
  TempDir tmp("brent");
  std::vector<SyntheticClipModel> models;
  for (int i = 0; i < 20; ++i) {
    models.push_back(make_1d_model("b" + std::to_string(i),
                                   uniform(rng, 0.005, 0.05),
                                   uniform(rng, 0.7, 5.0)));
  }
  SyntheticRun run = make_synthetic_run(tmp.path, models, {ModeKind::kAllFrames});
  OptimizerConfig cfg;
  cfg.x_tolerance = 1e-4;
  cfg.f_tolerance = 0.0;
  cfg.max_iterations = 100;
  cfg.max_cost_evals = 60;
  const ProxyProfile& profile =
      profile_by_label(run.config, run.config.search_profile);
  int max_evals = 0;
  double worst_k = 0.0, worst_bd = 0.0;
  for (const SyntheticClipModel& m : models) {
    const ManifestEntry& clip = run.orchestrator->entry(m.clip_id);
    RDCurve ref =
        run.orchestrator->run_reference(clip, profile, run.config.qp_anchors);
    OptimizationMode mode = run.orchestrator->mode_for(ModeKind::kAllFrames);
    VectorCost cost = run.orchestrator->make_cost(clip, ref, mode, profile);
    ScalarCost f = [&cost](double t) { return cost({t}); };
    OptimizerTrace trace = brent_minimize(f, mode.axis_bounds[0], cfg);
    max_evals = std::max(max_evals, static_cast<int>(trace.evaluations.size()));
    worst_k = std::max(worst_k, std::abs(trace.best_point[0] - m.k_star[0]));
    worst_bd = std::max(
        worst_bd, std::abs(trace.best_cost - analytic_optimal_bdrate(m)));
  }
  r.passed = worst_k <= 1e-3 && worst_bd <= 0.01 && max_evals <= 30;
  r.detail = "max |k - k*| = " + fmt_double(worst_k) +
             ", max |bd - analytic| = " + fmt_double(worst_bd) +
             ", max evals = " + std::to_string(max_evals);
  return r;
}

// Shared 2-D state for criteria 4 and 6.
struct TwoDState {
  std::vector<SyntheticClipModel> models;
  std::vector<double> converged_cost;
  std::vector<double> one_iter_cost;
  bool grid_agrees = true;
  double worst_lnk = 0.0;
  std::string detail4;
};

TwoDState run_2d_models() {
  TwoDState st;
  std::mt19937_64 rng(58008);
  TempDir tmp("powell");
  for (int i = 0; i < 20; ++i) {
    // |rho| capped at 0.5: stronger coupling tilts the discrete lattice
    // argmin beyond one cell of the continuous optimum, which is a property
    // of the lattice, not of the optimizer.
    double rho =
        uniform(rng, 0.15, 0.5) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1 : 1);
    double g1 = uniform(rng, 0.01, 0.05);
    double g2 = uniform(rng, 0.01, 0.05);
    double k1 = uniform(rng, 0.8, 4.5);
    double k2 = uniform(rng, 0.8, 4.5);
    st.models.push_back(
        make_2d_model("p" + std::to_string(i), g1, g2, k1, k2, rho));
  }
  SyntheticRun run =
      make_synthetic_run(tmp.path, st.models, {ModeKind::kPowellKfGfArf});
  OptimizerConfig cfg;
  cfg.x_tolerance = 1e-4;
  cfg.f_tolerance = 1e-6;
  cfg.max_iterations = 60;
  cfg.max_cost_evals = 4000;
  OptimizerConfig one_iter = cfg;
  one_iter.max_iterations = 1;

  const ProxyProfile& profile =
      profile_by_label(run.config, run.config.search_profile);
  for (const SyntheticClipModel& m : st.models) {
    const ManifestEntry& clip = run.orchestrator->entry(m.clip_id);
    RDCurve ref =
        run.orchestrator->run_reference(clip, profile, run.config.qp_anchors);
    OptimizationMode mode =
        run.orchestrator->mode_for(ModeKind::kPowellKfGfArf);
    VectorCost cost = run.orchestrator->make_cost(clip, ref, mode, profile);

    OptimizerTrace full =
        powell_minimize(cost, {1.0, 1.0}, mode.axis_bounds, cfg);
    st.converged_cost.push_back(full.best_cost);
    for (int axis = 0; axis < 2; ++axis) {
      double lnk_err = std::abs(std::log(full.best_point[axis]) -
                                std::log(m.k_star[axis]));
      st.worst_lnk = std::max(st.worst_lnk, lnk_err);
    }

    // The exhaustive lattice over the same cost must agree with Powell to
    // one grid step per axis.
    std::vector<GridAxis> axes{{0.6, 5.4, 0.1}, {0.6, 5.4, 0.1}};
    auto [gtrace, scan] = grid_search(cost, axes);
    for (int axis = 0; axis < 2; ++axis) {
      if (std::abs(gtrace.best_point[axis] - full.best_point[axis]) >
          0.1 + 1e-9) {
        st.grid_agrees = false;
        st.detail4 += " " + m.clip_id + ": grid (" +
                      fmt_g6(gtrace.best_point[0]) + ", " +
                      fmt_g6(gtrace.best_point[1]) + ") vs powell (" +
                      fmt_g6(full.best_point[0]) + ", " +
                      fmt_g6(full.best_point[1]) + ")";
      }
    }

    OptimizerTrace first =
        powell_minimize(cost, {1.0, 1.0}, mode.axis_bounds, one_iter);
    st.one_iter_cost.push_back(first.best_cost);
  }
  return st;
}

CriterionResult criterion_powell_convergence(const TwoDState& st) {
  CriterionResult r{4, "Powell recovers 2-D synthetic optima; grid agrees",
                    false, "", 0};
  r.passed = st.worst_lnk <= 1e-2 && st.grid_agrees;
  r.detail = "max |ln k - ln k*| = " + fmt_double(st.worst_lnk) +
             (st.grid_agrees ? ", grid argmin within one step"
                             : ", grid argmin DISAGREES:" + st.detail4);
  return r;
}

CriterionResult criterion_early_stop(const TwoDState& st) {
  CriterionResult r{6, "one Powell iteration lands near the converged cost",
                    false, "", 0};
  int close = 0;
  for (size_t i = 0; i < st.models.size(); ++i) {
    double full = st.converged_cost[i];
    double one = st.one_iter_cost[i];
    if (std::abs(full) < 1e-9) continue;
    if (std::abs(one - full) <= 0.25 * std::abs(full)) ++close;
  }
  r.passed = 2 * close >= static_cast<int>(st.models.size());
  r.detail = std::to_string(close) + "/" + std::to_string(st.models.size()) +
             " models within 25% after one iteration";
  return r;
}

// --------------------------------------------------------------------------
// Criterion 5: the reference lattice is 49x49 = 2401 points, and composing
// it with 5 qp anchors touches 12,005 rate-distortion points.
CriterionResult criterion_grid_cardinality() {
  CriterionResult r{5, "grid cardinality: 2401 anchors, 12005 RD points",
                    false, "", 0};
  TempDir tmp("grid");
  SyntheticRun run = make_synthetic_run(
      tmp.path, {make_2d_model("g0", 0.02, 0.03, 2.0, 1.4, 0.3)},
      {ModeKind::kGrid2d}, Bounds{0.6, 5.4});
  const ManifestEntry& clip = run.orchestrator->entry("g0");
  const ProxyProfile& profile =
      profile_by_label(run.config, run.config.search_profile);
  auto [trace, scan] = run.orchestrator->grid_scan(clip, profile, 0.1);
  long rd_points = 0;
  for (int count : scan.counts) {
    r.detail += (r.detail.empty() ? "axis counts " : "x") + std::to_string(count);
  }
  rd_points = static_cast<long>(scan.points.size()) *
              static_cast<long>(run.config.qp_anchors.size());
  // Every lattice evaluation consumes one RD point per anchor; the k = 1
  // reference encodes are re-served from cache inside the lattice.
  long launches = run.backend->launch_count();
  r.passed = scan.points.size() == 2401 && rd_points == 12005 &&
             launches == 12005;
  r.detail += ", lattice " + std::to_string(scan.points.size()) +
              ", rd points " + std::to_string(rd_points) + ", backend evals " +
              std::to_string(launches);
  return r;
}

// --------------------------------------------------------------------------
// Criterion 7: the full pipeline against a mock external encoder + metric
// tool, then a re-run that must be served entirely from cache.
void write_mock_tools(const std::string& dir, std::string* encoder,
                      std::string* metric) {
  *encoder = join_path(dir, "mock-encoder.sh");
  *metric = join_path(dir, "mock-metric.sh");
  write_file(*encoder, R"(#!/bin/sh
qp=0; kall=1; kkf=1; kgf=1; in=""; out=""
while [ $# -gt 0 ]; do
  case "$1" in
    --qp) qp=$2; shift 2;;
    --k-all) kall=$2; shift 2;;
    --k-kf) kkf=$2; shift 2;;
    --k-gf-arf) kgf=$2; shift 2;;
    --preset) shift 2;;
    --in) in=$2; shift 2;;
    --out) out=$2; shift 2;;
    *) shift;;
  esac
done
[ -f "$in" ] || exit 3
size=$(awk -v qp="$qp" -v ka="$kall" -v kk="$kkf" -v kg="$kgf" 'BEGIN {
  g = 0.25*(log(ka/1.7))^2 + 0.10*(log(kk/2.2))^2 + 0.08*(log(kg/1.4))^2;
  printf "%d", 120000 * exp(-0.055*qp) * exp(g) + 200;
}')
printf "qp=%s\n" "$qp" > "$out"
head -c "$size" /dev/zero >> "$out"
if [ -n "$LFORGE_MOCK_LOG" ]; then
  echo "enc qp=$qp ka=$kall kk=$kkf kg=$kgf" >> "$LFORGE_MOCK_LOG"
fi
exit 0
)");
  write_file(*metric, R"(#!/bin/sh
ref=""; enc=""; out=""
while [ $# -gt 0 ]; do
  case "$1" in
    --ref) ref=$2; shift 2;;
    --enc) enc=$2; shift 2;;
    --out) out=$2; shift 2;;
    *) shift;;
  esac
done
[ -f "$ref" ] || exit 3
[ -f "$enc" ] || exit 3
qp=$(head -n 1 "$enc" | sed -n 's/^qp=\([0-9]*\).*/\1/p')
[ -n "$qp" ] || exit 4
awk -v qp="$qp" 'BEGIN {
  ms = 0.9990 - 0.0032*qp;
  vm = 99.0 - 0.85*qp;
  printf "{\"pooled\": {\"ms_ssim\": %.9f, \"vmaf\": %.6f}, \"frames\": [", ms, vm;
  for (i = 0; i < 4; i++) {
    if (i) printf ", ";
    printf "{\"ms_ssim\": %.9f, \"vmaf\": %.6f}", ms, vm;
  }
  printf "]}\n";
}' > "$out"
if [ -n "$LFORGE_MOCK_LOG" ]; then
  echo "met qp=$qp" >> "$LFORGE_MOCK_LOG"
fi
exit 0
)");
  fs::permissions(*encoder, fs::perms::owner_all | fs::perms::group_read |
                                fs::perms::others_read);
  fs::permissions(*metric, fs::perms::owner_all | fs::perms::group_read |
                               fs::perms::others_read);
}

void write_test_clip(const std::string& path, int width, int height,
                     int frames, int luma_offset = 0) {
  Y4mHeader h;
  h.width = width;
  h.height = height;
  h.fps_num = 30;
  h.fps_den = 1;
  h.interlace = "p";
  h.colorspace = "420";
  Y4mWriter writer(path, h);
  Y4mFrame frame;
  frame.planes.resize(3);
  for (int f = 0; f < frames; ++f) {
    frame.planes[0].resize(h.plane_samples(0));
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        // Spatial gradient plus per-pixel temporal churn (nonzero SI and TI).
        frame.planes[0][static_cast<size_t>(y) * width + x] =
            static_cast<uint16_t>((x * 3 + y * 2 + f * (x % 7 + 1)) % 180 +
                                  20 + luma_offset);
      }
    }
    for (int p = 1; p < 3; ++p) {
      frame.planes[p].assign(h.plane_samples(p), 128);
    }
    writer.write_frame(frame);
  }
  writer.close();
}

long count_lines(const std::string& path) {
  if (!fs::exists(path)) return 0;
  std::string data = read_file(path);
  long n = 0;
  for (char c : data) {
    if (c == '\n') ++n;
  }
  return n;
}

CampaignConfig mock_config(const std::string& scratch,
                           const std::string& encoder,
                           const std::string& metric,
                           const std::string& clip_path) {
  CampaignConfig cfg;
  cfg.backend.type = "external";
  cfg.backend.encoder_template =
      encoder +
      " --qp {qp} --k-all {k_all} --k-kf {k_kf} --k-gf-arf {k_gf_arf}"
      " --preset {preset} --in {input} --out {output}";
  cfg.backend.metric_template =
      metric + " --ref {source} --enc {encoded} --out {output}";
  cfg.backend.version_tag = "mock-1";
  ProxyProfile search{"proxy-32-s6", 32, 18, 6, DownscaleFilter::kLanczos5};
  ProxyProfile final{"native-s2", 0, 0, 2, DownscaleFilter::kLanczos5};
  cfg.profiles = {{search.label, search}, {final.label, final}};
  cfg.search_profile = search.label;
  cfg.final_profile = final.label;
  cfg.modes = {ModeKind::kAllFrames};
  cfg.optimizer.x_tolerance = 5e-3;
  cfg.optimizer.f_tolerance = 1e-3;
  cfg.optimizer.max_cost_evals = 80;
  cfg.k_bounds = {0.5, 4.0};
  cfg.pool_size = 4;
  cfg.scratch_dir = scratch;
  cfg.cache_dir = join_path(scratch, "cache");
  cfg.store_path = join_path(scratch, "records.jsonl");
  (void)clip_path;
  return cfg;
}

std::vector<ManifestEntry> mock_manifest(const std::string& clip_path) {
  ManifestEntry e;
  e.clip_id = "mockclip";
  e.path = clip_path;
  e.shot_group = "Mock";
  e.dynamic_range = DynamicRange::kHdr;
  return {e};
}

CriterionResult criterion_mock_pipeline() {
  CriterionResult r{7, "end-to-end run against a mock external encoder",
                    false, "", 0};
  TempDir tmp("mock");
  std::string encoder, metric;
  write_mock_tools(tmp.path, &encoder, &metric);
  std::string clip_path = join_path(tmp.path, "clip.y4m");
  write_test_clip(clip_path, 64, 36, 16);
  std::string mock_log = join_path(tmp.path, "launches.log");
  ::setenv("LFORGE_MOCK_LOG", mock_log.c_str(), 1);

  CampaignConfig cfg = mock_config(tmp.path, encoder, metric, clip_path);
  std::string detail;

  {
    auto external = std::make_shared<ExternalBackend>(ExternalBackendConfig{
        cfg.backend.encoder_template, cfg.backend.metric_template,
        cfg.backend.qp_min, cfg.backend.qp_max, cfg.backend.version_tag,
        cfg.scratch_dir});
    auto cached = std::make_shared<CachedBackend>(external, cfg.cache_dir);
    Orchestrator orch(cfg, cached, mock_manifest(clip_path), nullptr);
    ResultsStore store(cfg.store_path);
    CampaignResult result = orch.run_campaign(store);
    check(result.executed == 1 && result.failures.empty(), "campaign executed",
          detail);
    if (!result.records.empty()) {
      const OptimizationRecord& rec = result.records.front();
      check(rec.error_phase.empty(), "record is clean: " + rec.error_message,
            detail);
      check(rec.iterations >= 1, "at least one optimizer iteration", detail);
      check(rec.cost_evals >= 1, "cost evaluations recorded", detail);
      check(rec.final_k.size() == 1, "final k present", detail);
      check(rec.bd_rate_search.has_value(), "bd_rate_search populated", detail);
      check(rec.bd_rate_final.has_value(), "bd_rate_final populated", detail);
      check(rec.bitrate_savings_avg.has_value(), "bitrate savings populated",
            detail);
      check(rec.bitrate_savings_q39.has_value(), "q39 savings populated",
            detail);
      check(rec.msssim_change_db.has_value(), "ms-ssim delta populated",
            detail);
      check(rec.vmaf_change.has_value(), "vmaf delta populated", detail);
      check(rec.wall_clock.reference_s >= 0 && rec.wall_clock.search_s >= 0 &&
                rec.wall_clock.final_s >= 0,
            "wall clock populated", detail);
    } else {
      check(false, "record emitted", detail);
    }
  }

  long launches_after_first = count_lines(mock_log);
  check(launches_after_first >= 10, "mock tools were exercised", detail);

  // Fresh process state, same cache: the rerun must not launch anything.
  {
    auto external = std::make_shared<ExternalBackend>(ExternalBackendConfig{
        cfg.backend.encoder_template, cfg.backend.metric_template,
        cfg.backend.qp_min, cfg.backend.qp_max, cfg.backend.version_tag,
        cfg.scratch_dir});
    auto cached = std::make_shared<CachedBackend>(external, cfg.cache_dir);
    Orchestrator orch(cfg, cached, mock_manifest(clip_path), nullptr);
    OptimizationRecord rec = orch.optimize_clip(
        orch.manifest().front(), orch.mode_for(ModeKind::kAllFrames),
        profile_by_label(cfg, cfg.search_profile),
        profile_by_label(cfg, cfg.final_profile), cfg.optimizer);
    check(rec.error_phase.empty(), "rerun record clean", detail);
    check(external->launch_count() == 0,
          "rerun launched " + std::to_string(external->launch_count()) +
              " processes",
          detail);
  }
  long launches_after_second = count_lines(mock_log);
  check(launches_after_second == launches_after_first,
        "mock log grew on rerun", detail);
  ::unsetenv("LFORGE_MOCK_LOG");

  r.passed = detail.empty();
  r.detail = detail.empty()
                 ? std::to_string(launches_after_first) + " launches, rerun 0"
                 : detail;
  return r;
}

// --------------------------------------------------------------------------
// Criterion 8: the cost callable at k = 1 is 0 for every clip/mode pair.
CriterionResult criterion_cost_at_identity() {
  CriterionResult r{8, "cost at k = 1 is zero for every clip and mode", false,
                    "", 0};
  TempDir tmp("identity");
  std::vector<SyntheticClipModel> models;
  for (int i = 0; i < 3; ++i) {
    models.push_back(
        make_1d_model("i" + std::to_string(i), 0.01 + 0.01 * i, 1.3 + 0.7 * i));
  }
  models.push_back(make_2d_model("i2a", 0.02, 0.04, 2.2, 1.1, 0.4));
  models.push_back(make_2d_model("i2b", 0.03, 0.02, 0.9, 3.0, -0.5));
  SyntheticRun run = make_synthetic_run(tmp.path, models, {});
  const ProxyProfile& profile =
      profile_by_label(run.config, run.config.search_profile);
  double worst = 0.0;
  for (const ManifestEntry& clip : run.orchestrator->manifest()) {
    std::vector<ModeKind> kinds =
        clip.model->dimension() == 1
            ? std::vector<ModeKind>{ModeKind::kAllFrames, ModeKind::kKeyframes,
                                    ModeKind::kGoldenAltref,
                                    ModeKind::kKeyGoldenAltref}
            : std::vector<ModeKind>{ModeKind::kPowellKfGfArf,
                                    ModeKind::kGrid2d};
    RDCurve ref =
        run.orchestrator->run_reference(clip, profile, run.config.qp_anchors);
    for (ModeKind kind : kinds) {
      OptimizationMode mode = run.orchestrator->mode_for(kind);
      VectorCost cost = run.orchestrator->make_cost(clip, ref, mode, profile);
      std::vector<double> ones(static_cast<size_t>(mode_dimension(kind)), 1.0);
      worst = std::max(worst, std::abs(cost(ones)));
    }
  }
  r.passed = worst <= 1e-9;
  r.detail = "max |cost(1)| = " + fmt_double(worst);
  return r;
}

// --------------------------------------------------------------------------
// Criterion 9: SI/TI are zero on constant clips and invariant to a global
// luma offset.
CriterionResult criterion_si_ti() {
  CriterionResult r{9, "SI/TI zero on constant clips, offset-invariant",
                    false, "", 0};
  TempDir tmp("siti");
  std::string flat = join_path(tmp.path, "flat.y4m");
  {
    Y4mHeader h;
    h.width = 48;
    h.height = 32;
    h.colorspace = "420";
    Y4mWriter w(flat, h);
    Y4mFrame frame;
    frame.planes.resize(3);
    for (int f = 0; f < 3; ++f) {
      frame.planes[0].assign(h.plane_samples(0), 100);
      frame.planes[1].assign(h.plane_samples(1), 128);
      frame.planes[2].assign(h.plane_samples(2), 128);
      w.write_frame(frame);
    }
    w.close();
  }
  auto [si0, ti0] = compute_si_ti(flat);

  std::string base = join_path(tmp.path, "tex.y4m");
  std::string offset = join_path(tmp.path, "tex-off.y4m");
  write_test_clip(base, 48, 32, 4, 0);
  write_test_clip(offset, 48, 32, 4, 10);
  auto [si_a, ti_a] = compute_si_ti(base);
  auto [si_b, ti_b] = compute_si_ti(offset);

  bool zero_ok = si0 == 0.0 && ti0 == 0.0;
  double dsi = std::abs(si_a - si_b), dti = std::abs(ti_a - ti_b);
  r.passed = zero_ok && dsi < 1e-9 && dti < 1e-9 && si_a > 0.0 && ti_a > 0.0;
  r.detail = "flat (SI, TI) = (" + fmt_double(si0) + ", " + fmt_double(ti0) +
             "), offset deltas (" + fmt_double(dsi) + ", " + fmt_double(dti) +
             ")";
  return r;
}

// --------------------------------------------------------------------------
// Criterion 10: reports are byte-identical across two pipeline runs and the
// histogram conserves the record count.
CriterionResult criterion_reporting_determinism() {
  CriterionResult r{10, "reporting outputs byte-stable and conservative",
                    false, "", 0};
  auto run_once = [](const std::string& scratch, std::string* summary,
                     std::string* histo, std::string* contour,
                     size_t* record_count) {
    std::vector<SyntheticClipModel> models = {
        make_1d_model("r0", 0.02, 1.8), make_1d_model("r1", 0.03, 0.9),
        make_1d_model("r2", 0.015, 3.2)};
    SyntheticRun run = make_synthetic_run(
        scratch, models, {ModeKind::kAllFrames, ModeKind::kKeyframes});
    ResultsStore store(run.config.store_path);
    CampaignResult result = run.orchestrator->run_campaign(store);
    *record_count = result.records.size();
    *summary = summary_csv(summarize(result.records));
    *histo = histogram_csv(histogram(result.records, 1.0), 1.0);
    long total = 0;
    for (const HistogramBin& b : histogram(result.records, 1.0)) {
      total += b.count;
    }
    size_t with_bd = 0;
    for (const OptimizationRecord& rec : result.records) {
      if (rec.bd_rate_final) ++with_bd;
    }
    if (static_cast<size_t>(total) != with_bd) {
      raise(Errc::kDomainError, "histogram lost records");
    }

    SyntheticRun grid_run = make_synthetic_run(
        join_path(scratch, "grid"),
        {make_2d_model("rg", 0.02, 0.03, 2.0, 1.3, 0.35)},
        {ModeKind::kGrid2d});
    auto [trace, scan] = grid_run.orchestrator->grid_scan(
        grid_run.orchestrator->manifest().front(),
        profile_by_label(grid_run.config, grid_run.config.search_profile),
        0.6);
    *contour = export_contour(scan, trace.evaluations);
  };

  TempDir tmp_a("report-a"), tmp_b("report-b");
  std::string sum_a, his_a, con_a, sum_b, his_b, con_b;
  size_t n_a = 0, n_b = 0;
  run_once(tmp_a.path, &sum_a, &his_a, &con_a, &n_a);
  run_once(tmp_b.path, &sum_b, &his_b, &con_b, &n_b);

  std::string detail;
  check(sum_a == sum_b, "summary differs across runs", detail);
  check(his_a == his_b, "histogram differs across runs", detail);
  check(con_a == con_b, "contour differs across runs", detail);
  check(n_a == n_b && n_a == 6, "expected 6 records", detail);
  r.passed = detail.empty();
  r.detail = detail.empty() ? "3 exports byte-identical over " +
                                  std::to_string(n_a) + " records"
                            : detail;
  return r;
}

CriterionResult timed(CriterionResult (*fn)()) {
  double t0 = now_seconds();
  CriterionResult r = fn();
  r.seconds = now_seconds() - t0;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all() {
  std::vector<CriterionResult> results;

  CriterionResult c1 = timed(criterion_bdrate_oracle);
  if (c1.seconds >= 10.0) {
    c1.passed = false;
    c1.detail += " (exceeded 10 s budget)";
  }
  results.push_back(c1);

  results.push_back(timed(criterion_scale_and_zero_law));

  CriterionResult c3 = timed(criterion_brent_convergence);
  if (c3.seconds >= 5.0) {
    c3.passed = false;
    c3.detail += " (exceeded 5 s budget)";
  }
  results.push_back(c3);

  double t2d = now_seconds();
  TwoDState st = run_2d_models();
  double t2d_used = now_seconds() - t2d;
  CriterionResult c4 = criterion_powell_convergence(st);
  c4.seconds = t2d_used;
  if (t2d_used >= 30.0) {
    c4.passed = false;
    c4.detail += " (exceeded 30 s budget)";
  }
  results.push_back(c4);

  results.push_back(timed(criterion_grid_cardinality));

  CriterionResult c6 = criterion_early_stop(st);
  results.push_back(c6);

  results.push_back(timed(criterion_mock_pipeline));
  results.push_back(timed(criterion_cost_at_identity));
  results.push_back(timed(criterion_si_ti));
  results.push_back(timed(criterion_reporting_determinism));

  std::sort(results.begin(), results.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.index < b.index;
            });
  return results;
}

int run_and_report(std::ostream& out) {
  std::vector<CriterionResult> results = run_all();
  bool all = true;
  for (const CriterionResult& r : results) {
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] %2d  %-55s (%.2fs) %s\n",
                  r.passed ? "PASS" : "FAIL", r.index, r.name.c_str(),
                  r.seconds, r.detail.c_str());
    out << line;
    all = all && r.passed;
  }
  out << (all ? "all criteria passed\n" : "CRITERIA FAILED\n");
  return all ? 0 : 1;
}

}  // namespace lforge::selftest
