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

#include "lforge/cli.h"

#include <csignal>

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "lforge/orchestrator.h"
#include "lforge/reporting.h"
#include "lforge/selftest.h"
#include "lforge/util.h"

namespace lforge {

namespace {

Orchestrator* g_active_orchestrator = nullptr;

void handle_interrupt(int) {
  if (g_active_orchestrator) g_active_orchestrator->request_cancel();
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "campaign config JSON")
      ->required();
  cmd->add_option("--set", args->overrides,
                  "override config values, key=value (repeatable)");
  cmd->add_flag("-v,--verbose", args->verbosity,
                "structured event log on stderr (repeat for per-encode detail)");
}

struct Session {
  CampaignConfig config;
  std::vector<ManifestEntry> manifest;
  std::shared_ptr<CachedBackend> backend;
  std::unique_ptr<Orchestrator> orchestrator;
  std::unique_ptr<EventLog> log;
};

Session open_session(const CommonArgs& args) {
  Session s;
  s.log = std::make_unique<EventLog>(&std::cerr, args.verbosity);
  s.config = load_config(args.config_path, args.overrides);
  for (const std::string& o : args.overrides) {
    s.log->event(0, "override", {{"set", o}});
  }
  if (s.config.manifest_path.empty()) {
    raise(Errc::kConfigError, "config has no manifest path");
  }
  s.manifest = load_manifest(s.config.manifest_path);

  std::shared_ptr<EncodeBackend> inner;
  if (s.config.backend.type == "synthetic") {
    auto synthetic = std::make_shared<SyntheticBackend>();
    for (const ManifestEntry& e : s.manifest) {
      if (!e.is_synthetic()) {
        raise(Errc::kConfigError,
              "clip '" + e.clip_id + "' has no model but backend is synthetic");
      }
      synthetic->register_model(*e.model);
    }
    inner = synthetic;
  } else {
    ExternalBackendConfig bc;
    bc.encoder_template = s.config.backend.encoder_template;
    bc.metric_template = s.config.backend.metric_template;
    bc.qp_min = s.config.backend.qp_min;
    bc.qp_max = s.config.backend.qp_max;
    bc.version_tag = s.config.backend.version_tag;
    bc.scratch_dir = s.config.scratch_dir;
    inner = std::make_shared<ExternalBackend>(bc);
  }
  s.backend = std::make_shared<CachedBackend>(inner, s.config.cache_dir);
  s.orchestrator = std::make_unique<Orchestrator>(s.config, s.backend,
                                                  s.manifest, s.log.get());
  return s;
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
  } else {
    write_file(path, data);
    std::cout << path << "\n";
  }
}

int cmd_scan(const CommonArgs& args, const std::string& out_path) {
  CampaignConfig cfg = load_config(args.config_path, args.overrides);
  std::vector<ManifestEntry> manifest = load_manifest(cfg.manifest_path);
  std::string csv =
      "clip_id,path,width,height,frame_count,fps,bit_depth,shot_group,"
      "dynamic_range,si,ti\n";
  for (const ManifestEntry& e : manifest) {
    if (e.is_synthetic()) {
      csv += e.clip_id + ",,,,,,," + e.shot_group + "," +
             dynamic_range_name(e.dynamic_range) + ",,\n";
      continue;
    }
    ClipRecord rec = scan_clip(e.path);
    auto [si, ti] = compute_si_ti(e.path);
    csv += e.clip_id + "," + e.path + "," + std::to_string(rec.width) + "," +
           std::to_string(rec.height) + "," + std::to_string(rec.frame_count) +
           "," + std::to_string(rec.frame_rate.num) + "/" +
           std::to_string(rec.frame_rate.den) + "," +
           std::to_string(rec.bit_depth) + "," + e.shot_group + "," +
           dynamic_range_name(e.dynamic_range) + "," + fmt_g6(si) + "," +
           fmt_g6(ti) + "\n";
  }
  emit(out_path, csv);
  return 0;
}

int cmd_reference(const CommonArgs& args, const std::string& clip_id,
                  const std::string& profile_label) {
  Session s = open_session(args);
  const ManifestEntry& clip =
      clip_id.empty() ? s.manifest.front() : s.orchestrator->entry(clip_id);
  std::string label =
      profile_label.empty() ? s.config.search_profile : profile_label;
  RDCurve curve = s.orchestrator->run_reference(
      clip, profile_by_label(s.config, label), s.config.qp_anchors);
  Json j = Json::array();
  for (const RDPoint& p : curve.points()) j.push_back(p);
  std::cout << Json{{"clip_id", curve.clip_id()}, {"profile", label},
                    {"points", j}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_optimize(const CommonArgs& args) {
  Session s = open_session(args);
  ResultsStore store(s.config.store_path);
  g_active_orchestrator = s.orchestrator.get();
  std::signal(SIGINT, handle_interrupt);
  CampaignResult result = s.orchestrator->run_campaign(store);
  std::signal(SIGINT, SIG_DFL);
  g_active_orchestrator = nullptr;

  s.log->event(0, "campaign_done",
               {{"executed", result.executed},
                {"skipped", result.skipped},
                {"failures", result.failures.size()},
                {"store", s.config.store_path}});
  if (!result.records.empty()) {
    try {
      std::cout << summary_csv(summarize(result.records));
    } catch (const Error& e) {
      if (e.code() != Errc::kEmptyInput) throw;
    }
  }
  for (const CampaignFailure& f : result.failures) {
    std::cerr << "error: clip " << f.clip_id << " mode " << f.mode << ": "
              << f.message << "\n";
  }
  if (result.cancelled) {
    std::cerr << "campaign cancelled; store flushed, rerun to resume\n";
    return 1;
  }
  return result.failures.empty() ? 0 : 1;
}

int cmd_grid(const CommonArgs& args, const std::string& clip_id,
             const std::string& out_prefix) {
  Session s = open_session(args);
  const ManifestEntry& clip =
      clip_id.empty() ? s.manifest.front() : s.orchestrator->entry(clip_id);
  const ProxyProfile& profile =
      profile_by_label(s.config, s.config.search_profile);
  auto [grid_trace, scan] =
      s.orchestrator->grid_scan(clip, profile, s.config.grid_step);

  // Powell overlay over the same cost, for the contour's search path.
  RDCurve reference =
      s.orchestrator->run_reference(clip, profile, s.config.qp_anchors);
  OptimizationMode mode = s.orchestrator->mode_for(ModeKind::kPowellKfGfArf);
  VectorCost cost = s.orchestrator->make_cost(clip, reference, mode, profile);
  OptimizerTrace powell =
      powell_minimize(cost, {1.0, 1.0}, mode.axis_bounds, s.config.optimizer);

  write_file(out_prefix + ".matrix.csv",
             export_contour(scan, powell.evaluations));
  write_file(out_prefix + ".long.csv", contour_long_csv(scan));
  std::cout << out_prefix + ".matrix.csv\n" << out_prefix + ".long.csv\n";
  s.log->event(0, "grid_done",
               {{"clip", clip.clip_id},
                {"points", scan.points.size()},
                {"argmin", grid_trace.best_point},
                {"powell", powell.best_point}});
  return 0;
}

int cmd_report(const CommonArgs& args, const std::string& out_dir,
               double bin_width) {
  CampaignConfig cfg = load_config(args.config_path, args.overrides);
  ResultsStore store(cfg.store_path);
  if (store.records().empty()) {
    raise(Errc::kEmptyInput, "results store " + cfg.store_path + " is empty");
  }
  ensure_dir(out_dir);
  const std::vector<OptimizationRecord>& records = store.records();
  std::string summary_path = join_path(out_dir, "summary.csv");
  write_file(summary_path, summary_csv(summarize(records)));
  std::cout << summary_path << "\n";
  std::string histo_path = join_path(out_dir, "histogram.csv");
  write_file(histo_path, histogram_csv(histogram(records, bin_width), bin_width));
  std::cout << histo_path << "\n";
  try {
    std::string proxy_path = join_path(out_dir, "proxy_comparison.csv");
    write_file(proxy_path, proxy_comparison_csv(proxy_comparison(records)));
    std::cout << proxy_path << "\n";
  } catch (const Error& e) {
    if (e.code() != Errc::kMissingPairing) throw;
    std::cerr << "note: proxy comparison skipped (" << e.what() << ")\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"per-clip rate-control multiplier tuning driven by BD-rate"};
  app.require_subcommand(1);

  CommonArgs scan_args, ref_args, opt_args, grid_args, report_args;
  std::string scan_out, ref_clip, ref_profile, grid_clip,
      grid_prefix = "contour", report_dir = "reports";
  double report_bin_width = 1.0;

  CLI::App* scan = app.add_subcommand("scan", "corpus inventory with SI/TI");
  add_common(scan, &scan_args);
  scan->add_option("--out", scan_out, "CSV output path (default stdout)");

  CLI::App* reference =
      app.add_subcommand("reference", "build a k=1 reference curve");
  add_common(reference, &ref_args);
  reference->add_option("--clip", ref_clip, "clip id (default: first)");
  reference->add_option("--profile", ref_profile,
                        "profile label (default: search profile)");

  CLI::App* optimize =
      app.add_subcommand("optimize", "run the optimization campaign");
  add_common(optimize, &opt_args);

  CLI::App* grid =
      app.add_subcommand("grid", "exhaustive 2-D multiplier scan + contour export");
  add_common(grid, &grid_args);
  grid->add_option("--clip", grid_clip, "clip id (default: first)");
  grid->add_option("--out-prefix", grid_prefix, "output file prefix");

  CLI::App* report =
      app.add_subcommand("report", "summaries from the results store");
  add_common(report, &report_args);
  report->add_option("--out-dir", report_dir, "output directory");
  report->add_option("--bin-width", report_bin_width, "histogram bin width");

  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the synthetic-backend acceptance suite");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scan->parsed()) return cmd_scan(scan_args, scan_out);
    if (reference->parsed()) return cmd_reference(ref_args, ref_clip, ref_profile);
    if (optimize->parsed()) return cmd_optimize(opt_args);
    if (grid->parsed()) return cmd_grid(grid_args, grid_clip, grid_prefix);
    if (report->parsed()) return cmd_report(report_args, report_dir, report_bin_width);
    if (selftest->parsed()) return selftest::run_and_report(std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace lforge
