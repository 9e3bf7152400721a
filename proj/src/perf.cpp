#include "dphls/perf.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace dphls {

namespace {

void require_config(const EngineConfig& config) {
  const auto violations = validate_config(config);
  if (!violations.empty()) throw Error(ErrorCode::InvalidConfig, violations.front().detail);
}

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

int ceil_log2(int n) {
  int bits = 0;
  while ((1LL << bits) < n) ++bits;
  return bits;
}

}  // namespace

CycleReport model_alignment_cycles(const EngineConfig& config, int query_length, int reference_length, int path_len) {
  require_config(config);
  if (query_length < 1 || reference_length < 1)
    throw Error(ErrorCode::InvalidConfig, "sequence lengths must be positive");
  if (path_len < 0 || path_len > query_length + reference_length)
    throw Error(ErrorCode::InvalidConfig, "path length must lie in [0, Q + R]");

  CycleReport r;
  const long long active_rows = std::min(config.n_pe, query_length);
  r.fill_cycles = ceil_div(query_length, config.n_pe) * (reference_length + active_rows - 1) * config.ii +
                  config.pipeline_depth;
  r.traceback_cycles = path_len + 1;
  r.reduction_cycles = ceil_log2(config.n_pe) + 1;
  r.overhead_cycles = config.fixed_overhead_cycles;
  r.total_cycles = r.fill_cycles + r.traceback_cycles + r.reduction_cycles + r.overhead_cycles;
  r.alignments_per_second =
      config.clock_mhz * 1e6 * config.n_b * config.n_k / static_cast<double>(r.total_cycles);
  return r;
}

double ScheduleTrace::utilization() const {
  if (fill_cycles == 0) return 0.0;
  long long busy = 0;
  for (const auto& e : events) busy += static_cast<long long>(e.active_pes) * ii;
  return static_cast<double>(busy) / (static_cast<double>(fill_cycles) * n_pe);
}

ScheduleTrace simulate_schedule(const EngineConfig& config, int query_length, int reference_length) {
  require_config(config);
  if (query_length < 1 || reference_length < 1)
    throw Error(ErrorCode::InvalidConfig, "sequence lengths must be positive");
  if (query_length > kMaxSimulatedLength || reference_length > kMaxSimulatedLength)
    throw Error(ErrorCode::TraceSizeExceeded, "schedule traces are limited to " + std::to_string(kMaxSimulatedLength));

  ScheduleTrace trace;
  trace.n_pe = config.n_pe;
  trace.ii = config.ii;
  // The PE loop has a fixed trip count: a partial last chunk still sweeps
  // R + min(n_pe, Q) - 1 wavefronts with its unused PEs idle.
  const int sweep = reference_length + std::min(config.n_pe, query_length) - 1;
  const int chunks = (query_length + config.n_pe - 1) / config.n_pe;
  long long cycle = 0;
  for (int c = 0; c < chunks; ++c) {
    const int rows = std::min(config.n_pe, query_length - c * config.n_pe);
    for (int w = 0; w < sweep; ++w) {
      int active = 0;
      for (int p = 0; p < rows; ++p)
        if (w - p >= 0 && w - p < reference_length) ++active;
      trace.events.push_back({cycle, c, w, active});
      cycle += config.ii;
    }
  }
  trace.fill_cycles = cycle + config.pipeline_depth;
  return trace;
}

std::vector<SweepRow> scaling_sweep(const EngineConfig& base, std::span<const int> n_pe_values,
                                    std::span<const int> n_b_values, int query_length, int reference_length,
                                    int path_len) {
  std::vector<SweepRow> rows;
  for (int n_pe : n_pe_values)
    for (int n_b : n_b_values) {
      EngineConfig c = base;
      c.n_pe = n_pe;
      c.n_b = n_b;
      rows.push_back({c, model_alignment_cycles(c, query_length, reference_length, path_len)});
    }
  return rows;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(xs[k]);
    const double y = std::log(ys[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (static_cast<double>(n) * sxy - sx * sy) / denom;
}

bool strictly_concave(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    const double slope = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
    if (!(slope < prev)) return false;
    prev = slope;
  }
  return true;
}

void write_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "n_pe,n_b,n_k,ii,clock_mhz,fill,tb,total,throughput\n";
  for (const auto& row : rows) {
    const auto& c = row.config;
    const auto& r = row.report;
    os << c.n_pe << ',' << c.n_b << ',' << c.n_k << ',' << c.ii << ',' << c.clock_mhz << ',' << r.fill_cycles << ','
       << r.traceback_cycles << ',' << r.total_cycles << ',' << std::setprecision(6) << r.alignments_per_second
       << '\n';
  }
}

std::string format_report(const CycleReport& r) {
  std::ostringstream os;
  os << "fill_cycles " << r.fill_cycles << '\n'
     << "traceback_cycles " << r.traceback_cycles << '\n'
     << "reduction_cycles " << r.reduction_cycles << '\n'
     << "overhead_cycles " << r.overhead_cycles << '\n'
     << "total_cycles " << r.total_cycles << '\n'
     << "alignments_per_second " << std::setprecision(6) << r.alignments_per_second << '\n';
  return os.str();
}

std::span<const PublishedThroughput> published_throughput() {
  static constexpr std::array<PublishedThroughput, 15> rows{{
      {1, 64, 16, 4, 250.0, 3.51e6},
      {2, 32, 16, 4, 250.0, 2.85e6},
      {3, 32, 16, 5, 250.0, 3.43e6},
      {4, 32, 16, 4, 250.0, 2.71e6},
      {5, 32, 8, 5, 150.0, 1.06e6},
      {6, 32, 16, 4, 250.0, 2.73e6},
      {7, 32, 16, 4, 250.0, 3.34e6},
      {8, 16, 1, 5, 166.7, 3.70e4},
      {9, 64, 4, 3, 200.0, 2.31e5},
      {10, 16, 4, 7, 125.0, 4.90e5},
      {11, 64, 8, 7, 166.7, 2.25e6},
      {12, 16, 16, 7, 200.0, 4.77e6},
      {13, 16, 8, 7, 125.0, 1.24e6},
      {14, 32, 16, 5, 250.0, 5.16e6},
      {15, 32, 8, 5, 200.0, 9.33e5},
  }};
  return rows;
}

int calibrate_overhead(std::span<const PublishedThroughput> rows, const EngineConfig& base, int query_length,
                       int reference_length, int path_len) {
  auto loss = [&](int overhead) {
    double sum = 0.0;
    for (const auto& row : rows) {
      EngineConfig c = base;
      c.n_pe = row.n_pe;
      c.n_b = row.n_b;
      c.n_k = row.n_k;
      c.clock_mhz = row.clock_mhz;
      c.fixed_overhead_cycles = overhead;
      const double modelled = model_alignment_cycles(c, query_length, reference_length, path_len).alignments_per_second;
      const double err = std::log(modelled / row.alignments_per_second);
      sum += err * err;
    }
    return sum;
  };
  int best = 0;
  double best_loss = loss(0);
  for (int o = 1; o <= 200000; ++o) {
    const double l = loss(o);
    if (l < best_loss) {
      best_loss = l;
      best = o;
    }
  }
  return best;
}

}  // namespace dphls
