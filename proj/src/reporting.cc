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

#include "lforge/reporting.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lforge/util.h"

namespace lforge {

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_g6(*v) : "";
}

// k vectors render as semicolon-joined values so CSV cells stay unquoted.
std::string fmt_k(const std::vector<double>& k) {
  std::string out;
  for (size_t i = 0; i < k.size(); ++i) {
    if (i) out += ";";
    out += fmt_g6(k[i]);
  }
  return out;
}

struct Accumulator {
  double sum = 0.0;
  int n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

}  // namespace

std::vector<GroupSummary> summarize(
    const std::vector<OptimizationRecord>& records) {
  std::map<std::pair<std::string, std::string>,
           std::vector<const OptimizationRecord*>>
      groups;
  for (const OptimizationRecord& r : records) {
    if (!r.bd_rate_final) continue;
    groups[{r.shot_group, mode_name(r.mode)}].push_back(&r);
  }
  if (groups.empty()) {
    raise(Errc::kEmptyInput, "no records with a final BD-rate to summarize");
  }
  std::vector<GroupSummary> out;
  for (const auto& [key, rows] : groups) {
    GroupSummary s;
    s.shot_group = key.first;
    s.mode = rows.front()->mode;
    s.clip_count = static_cast<int>(rows.size());
    size_t dim = rows.front()->final_k.size();
    s.avg_k.assign(dim, 0.0);
    double bd_sum = 0.0;
    s.bd_rate_min = std::numeric_limits<double>::infinity();
    s.bd_rate_max = -std::numeric_limits<double>::infinity();
    double iter_sum = 0.0;
    Accumulator savings, q39, msssim, vmaf;
    for (const OptimizationRecord* r : rows) {
      double bd = *r->bd_rate_final;
      bd_sum += bd;
      s.bd_rate_min = std::min(s.bd_rate_min, bd);
      s.bd_rate_max = std::max(s.bd_rate_max, bd);
      iter_sum += r->iterations;
      for (size_t i = 0; i < dim && i < r->final_k.size(); ++i) {
        s.avg_k[i] += r->final_k[i];
      }
      savings.add(r->bitrate_savings_avg);
      q39.add(r->bitrate_savings_q39);
      msssim.add(r->msssim_change_db);
      vmaf.add(r->vmaf_change);
    }
    s.bd_rate_avg = bd_sum / s.clip_count;
    s.iterations_avg = iter_sum / s.clip_count;
    for (double& v : s.avg_k) v /= s.clip_count;
    s.bitrate_savings_avg = savings.mean();
    s.bitrate_savings_q39_avg = q39.mean();
    s.msssim_change_db_avg = msssim.mean();
    s.vmaf_change_avg = vmaf.mean();
    out.push_back(std::move(s));
  }
  return out;  // map iteration is already (group, mode) ordered
}

std::string summary_csv(const std::vector<GroupSummary>& summaries) {
  std::string out =
      "shot_group,mode,clip_count,avg_k,bd_rate_avg,bd_rate_min,bd_rate_max,"
      "iterations_avg,bitrate_savings_avg,bitrate_savings_q39,"
      "msssim_change_db,vmaf_change\n";
  for (const GroupSummary& s : summaries) {
    out += s.shot_group + "," + mode_name(s.mode) + "," +
           std::to_string(s.clip_count) + "," + fmt_k(s.avg_k) + "," +
           fmt_g6(s.bd_rate_avg) + "," + fmt_g6(s.bd_rate_min) + "," +
           fmt_g6(s.bd_rate_max) + "," + fmt_g6(s.iterations_avg) + "," +
           fmt_opt(s.bitrate_savings_avg) + "," +
           fmt_opt(s.bitrate_savings_q39_avg) + "," +
           fmt_opt(s.msssim_change_db_avg) + "," + fmt_opt(s.vmaf_change_avg) +
           "\n";
  }
  return out;
}

std::vector<HistogramBin> histogram(
    const std::vector<OptimizationRecord>& records, double bin_width) {
  if (!(bin_width > 0.0)) {
    raise(Errc::kDomainError, "bin width must be positive");
  }
  std::vector<double> values;
  for (const OptimizationRecord& r : records) {
    if (r.bd_rate_final) values.push_back(*r.bd_rate_final);
  }
  if (values.empty()) {
    raise(Errc::kEmptyInput, "no records with a final BD-rate");
  }
  auto bin_of = [bin_width](double v) {
    return static_cast<long>(std::floor(v / bin_width));
  };
  long lo = bin_of(values[0]), hi = lo;
  for (double v : values) {
    lo = std::min(lo, bin_of(v));
    hi = std::max(hi, bin_of(v));
  }
  std::vector<HistogramBin> bins;
  for (long b = lo; b <= hi; ++b) {
    bins.push_back({b * bin_width, 0});
  }
  for (double v : values) {
    bins[static_cast<size_t>(bin_of(v) - lo)].count += 1;
  }
  return bins;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins,
                          double bin_width) {
  std::string out = "bin_low,bin_high,count\n";
  for (const HistogramBin& b : bins) {
    out += fmt_g6(b.bin_low) + "," + fmt_g6(b.bin_low + bin_width) + "," +
           std::to_string(b.count) + "\n";
  }
  return out;
}

std::string export_contour(const GridScan& scan,
                           const std::vector<Evaluation>& path) {
  if (scan.axes.size() != 2) {
    raise(Errc::kDimensionMismatch, "contour export needs a 2-D scan");
  }
  std::vector<double> k1 = grid_axis_values(scan.axes[0]);
  std::vector<double> k2 = grid_axis_values(scan.axes[1]);
  std::string out = "k1\\k2";
  for (double v : k2) out += "," + fmt_g6(v);
  out += "\n";
  for (size_t i = 0; i < k1.size(); ++i) {
    out += fmt_g6(k1[i]);
    for (size_t j = 0; j < k2.size(); ++j) {
      out += "," + fmt_g6(scan.costs[i * k2.size() + j]);
    }
    out += "\n";
  }
  if (!path.empty()) {
    out += "\npath_k1,path_k2,path_cost\n";
    for (const Evaluation& e : path) {
      out += fmt_g6(e.point.at(0)) + "," + fmt_g6(e.point.at(1)) + "," +
             fmt_g6(e.cost) + "\n";
    }
  }
  return out;
}

GridScan parse_contour(const std::string& csv, std::vector<Evaluation>* path) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k1\\k2", 0) != 0) {
    raise(Errc::kParseFailure, "missing contour header row");
  }
  std::vector<std::string> head = split(line, ',');
  std::vector<double> k2;
  for (size_t i = 1; i < head.size(); ++i) k2.push_back(std::stod(head[i]));

  GridScan scan;
  std::vector<double> k1;
  while (std::getline(in, line)) {
    if (line.empty()) break;  // path section follows
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != k2.size() + 1) {
      raise(Errc::kParseFailure, "contour row has wrong cell count");
    }
    k1.push_back(std::stod(cells[0]));
    for (size_t j = 1; j < cells.size(); ++j) {
      scan.costs.push_back(std::stod(cells[j]));
    }
  }
  if (k1.empty()) raise(Errc::kParseFailure, "contour matrix is empty");
  auto axis_of = [](const std::vector<double>& v) {
    GridAxis a;
    a.low = v.front();
    a.high = v.back();
    a.step = v.size() > 1 ? (v.back() - v.front()) / (v.size() - 1) : 1.0;
    return a;
  };
  scan.axes = {axis_of(k1), axis_of(k2)};
  scan.counts = {static_cast<int>(k1.size()), static_cast<int>(k2.size())};
  for (double a : k1) {
    for (double b : k2) {
      scan.points.push_back({a, b});
    }
  }
  if (path) {
    path->clear();
    if (std::getline(in, line) && line.rfind("path_k1", 0) == 0) {
      while (std::getline(in, line)) {
        if (line.empty()) break;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != 3) {
          raise(Errc::kParseFailure, "path row has wrong cell count");
        }
        Evaluation e;
        e.point = {std::stod(cells[0]), std::stod(cells[1])};
        e.cost = std::stod(cells[2]);
        path->push_back(std::move(e));
      }
    }
  }
  return scan;
}

std::string contour_long_csv(const GridScan& scan) {
  if (scan.axes.size() != 2) {
    raise(Errc::kDimensionMismatch, "long-form contour needs a 2-D scan");
  }
  std::string out = "k1,k2,cost\n";
  for (size_t i = 0; i < scan.points.size(); ++i) {
    out += fmt_g6(scan.points[i][0]) + "," + fmt_g6(scan.points[i][1]) + "," +
           fmt_g6(scan.costs[i]) + "\n";
  }
  return out;
}

ProxyComparisonTable proxy_comparison(
    const std::vector<OptimizationRecord>& records) {
  // Group by search profile; pair rows on (clip, mode).
  std::map<std::string, std::map<std::pair<std::string, std::string>,
                                 const OptimizationRecord*>>
      by_profile;
  for (const OptimizationRecord& r : records) {
    by_profile[r.search_profile][{r.clip_id, mode_name(r.mode)}] = &r;
  }
  if (by_profile.size() < 2) {
    raise(Errc::kMissingPairing,
          "proxy comparison needs records from >= 2 search profiles");
  }
  ProxyComparisonTable table;
  for (const auto& [label, rows] : by_profile) table.profiles.push_back(label);

  std::map<std::pair<std::string, std::string>, int> pair_counts;
  for (const auto& [label, rows] : by_profile) {
    for (const auto& [key, rec] : rows) pair_counts[key] += 1;
  }
  bool any_complete = false;
  for (const auto& [key, count] : pair_counts) {
    if (count != static_cast<int>(table.profiles.size())) {
      table.gaps.push_back(key.first + "/" + key.second);
      continue;
    }
    any_complete = true;
    ProxyComparisonRow row;
    row.clip_id = key.first;
    row.mode = mode_from_string(key.second);
    double slowest = 0.0;
    for (const std::string& label : table.profiles) {
      const OptimizationRecord* r = by_profile[label][key];
      double wall = r->wall_clock.reference_s + r->wall_clock.search_s +
                    r->wall_clock.final_s;
      row.wall_clock_s.push_back(wall);
      row.final_k.push_back(r->final_k);
      row.bd_rate_final.push_back(r->bd_rate_final);
      slowest = std::max(slowest, wall);
    }
    for (double wall : row.wall_clock_s) {
      row.speedup.push_back(wall > 0.0 ? slowest / wall : 0.0);
    }
    table.rows.push_back(std::move(row));
  }
  if (!any_complete) {
    raise(Errc::kMissingPairing,
          "no (clip, mode) pair is measured under every profile");
  }
  return table;
}

std::string proxy_comparison_csv(const ProxyComparisonTable& table) {
  std::string out = "clip_id,mode";
  for (const std::string& p : table.profiles) {
    out += ",wall_s[" + p + "],k[" + p + "],bd_rate[" + p + "],speedup[" + p + "]";
  }
  out += "\n";
  for (const ProxyComparisonRow& row : table.rows) {
    out += row.clip_id + std::string(",") + mode_name(row.mode);
    for (size_t i = 0; i < table.profiles.size(); ++i) {
      out += "," + fmt_g6(row.wall_clock_s[i]) + "," + fmt_k(row.final_k[i]) +
             "," + fmt_opt(row.bd_rate_final[i]) + "," +
             fmt_g6(row.speedup[i]);
    }
    out += "\n";
  }
  if (!table.gaps.empty()) {
    out += "\nmissing_pairings\n";
    for (const std::string& g : table.gaps) out += g + "\n";
  }
  return out;
}

}  // namespace lforge
