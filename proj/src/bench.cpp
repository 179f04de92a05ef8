#include "gpusim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gpusim/engine.hpp"
#include "gpusim/stats.hpp"

namespace gpusim {

double BenchRecord::median() const {
  if (wall_seconds.empty()) return 0.0;
  std::vector<double> v = wall_seconds;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<BenchRecord> sweep(const GpuConfig& cfg, const std::vector<Workload>& workloads,
                               const std::vector<std::uint32_t>& worker_counts,
                               const std::vector<SchedulePolicy::Kind>& policies,
                               const SweepOptions& options) {
  if (options.repeats < 3) throw std::invalid_argument("repeats must be at least 3");
  std::vector<BenchRecord> records;
  for (const auto& wl : workloads) {
    std::vector<SchedulePolicy> cells{SchedulePolicy::sequential()};
    for (std::uint32_t w : worker_counts) {
      if (w == 0) throw std::invalid_argument("worker counts must be positive");
      if (w == 1) continue;
      for (auto kind : policies) {
        if (kind == SchedulePolicy::Kind::Sequential) continue;
        cells.push_back(SchedulePolicy{kind, w, 1});
      }
    }

    const std::size_t first = records.size();
    for (const auto& p : cells) records.push_back(BenchRecord{wl.name, p, {}, {}, 0});

    std::string reference;
    for (std::uint32_t r = 0; r < options.repeats; ++r) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        EngineOptions eo;
        eo.oversubscribe = options.oversubscribe;
        eo.time_phases = false;
        Engine engine(cfg, wl.program, cells[c], eo);
        RunResult res = engine.run();
        std::string report = render_report(res.stats);
        BenchRecord& rec = records[first + c];
        rec.wall_seconds.push_back(res.wall_seconds);
        if (reference.empty()) reference = report;
        if (report != reference) {
          auto key = diff_reports(reference, report);
          throw DeterminismViolation("workload " + wl.name + ": " + cells[c].label() +
                                     " differs from sequential at key '" + key.value_or("?") + "'");
        }
        rec.digest = report_digest(report);
        rec.cycles = res.stats.cycles;
      }
    }
  }
  return records;
}

std::vector<SpeedupRow> speedup_table(const std::vector<BenchRecord>& records) {
  std::map<std::string, double> baseline;
  for (const auto& r : records) {
    if (r.policy.kind == SchedulePolicy::Kind::Sequential) baseline[r.workload] = r.median();
  }
  std::vector<SpeedupRow> rows;
  for (const auto& r : records) {
    SpeedupRow row;
    row.workload = r.workload;
    row.policy = r.policy;
    row.median_seconds = r.median();
    auto it = baseline.find(r.workload);
    row.baseline_seconds = it != baseline.end() ? it->second : row.median_seconds;
    // A one-worker run is the sequential baseline by definition.
    if (r.policy.effective_workers() == 1) {
      row.speedup = 1.0;
    } else {
      row.speedup = row.median_seconds > 0.0 ? row.baseline_seconds / row.median_seconds : 0.0;
    }
    row.efficiency = row.speedup / r.policy.effective_workers();
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CorrelationResult correlate(const std::vector<SpeedupRow>& table, SchedulePolicy::Kind kind) {
  // workload -> (max workers seen, speedup there, baseline seconds)
  std::map<std::string, std::tuple<std::uint32_t, double, double>> best;
  std::vector<std::string> order;
  for (const auto& row : table) {
    if (row.policy.kind != kind && row.policy.kind != SchedulePolicy::Kind::Sequential) continue;
    const std::uint32_t w = row.policy.effective_workers();
    auto [it, inserted] = best.try_emplace(row.workload, w, row.speedup, row.baseline_seconds);
    if (inserted) {
      order.push_back(row.workload);
    } else if (w > std::get<0>(it->second)) {
      it->second = {w, row.speedup, row.baseline_seconds};
    }
  }
  CorrelationResult res;
  for (const auto& name : order) {
    res.workloads.push_back(name);
    res.sequential_seconds.push_back(std::get<2>(best[name]));
    res.speedups.push_back(std::get<1>(best[name]));
  }
  res.r = pearson(res.sequential_seconds, res.speedups);
  return res;
}

std::vector<SchedulerComparison> scheduler_compare(const std::vector<SpeedupRow>& table) {
  std::vector<SchedulerComparison> out;
  for (const auto& row : table) {
    if (row.policy.kind != SchedulePolicy::Kind::Static) continue;
    for (const auto& other : table) {
      if (other.workload == row.workload && other.policy.kind == SchedulePolicy::Kind::Dynamic &&
          other.policy.workers == row.policy.workers) {
        out.push_back({row.workload, row.policy.workers, row.speedup, other.speedup});
      }
    }
  }
  return out;
}

std::vector<SchedulerComparison> scheduler_compare(const GpuConfig& cfg,
                                                   const std::vector<Workload>& workloads,
                                                   const std::vector<std::uint32_t>& worker_counts,
                                                   const SweepOptions& options) {
  auto records = sweep(cfg, workloads, worker_counts,
                       {SchedulePolicy::Kind::Static, SchedulePolicy::Kind::Dynamic}, options);
  return scheduler_compare(speedup_table(records));
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "workload,policy,workers,repeat,wall_seconds,digest\n";
  char buf[64];
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.wall_seconds.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9f", r.wall_seconds[i]);
      out << r.workload << ',' << to_string(r.policy.kind) << ',' << r.policy.effective_workers()
          << ',' << i << ',' << buf << ',' << r.digest << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SpeedupRow>& table) {
  out << "workload,policy,workers,median_seconds,speedup,efficiency\n";
  char buf[128];
  for (const auto& row : table) {
    std::snprintf(buf, sizeof buf, "%.9f,%.4f,%.4f", row.median_seconds, row.speedup,
                  row.efficiency);
    out << row.workload << ',' << to_string(row.policy.kind) << ','
        << row.policy.effective_workers() << ',' << buf << '\n';
  }
}

}  // namespace gpusim
