#pragma once

#include "dphls/kernel_spec.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dphls {

struct CycleReport {
  long long fill_cycles = 0;
  long long traceback_cycles = 0;
  long long reduction_cycles = 0;
  long long overhead_cycles = 0;
  long long total_cycles = 0;
  double alignments_per_second = 0.0;
};

/// Analytic cycle count of one alignment on one block, and the aggregate
/// throughput of n_b blocks on each of n_k channels.
CycleReport model_alignment_cycles(const EngineConfig& config, int query_length, int reference_length, int path_len);

struct WavefrontEvent {
  long long cycle = 0;  // issue cycle
  int chunk = 0;
  int wavefront = 0;
  int active_pes = 0;
};

struct ScheduleTrace {
  int n_pe = 1;
  int ii = 1;
  long long fill_cycles = 0;
  std::vector<WavefrontEvent> events;

  /// Busy PE-cycles over available PE-cycles.
  double utilization() const;
};

inline constexpr int kMaxSimulatedLength = 1024;

/// Discrete-event replay of the wavefront schedule, one event per issued
/// wavefront. Throws TraceSizeExceeded past 1024 symbols.
ScheduleTrace simulate_schedule(const EngineConfig& config, int query_length, int reference_length);

struct SweepRow {
  EngineConfig config;
  CycleReport report;
};

/// Throughput over the cross product of n_pe and n_b values.
std::vector<SweepRow> scaling_sweep(const EngineConfig& base, std::span<const int> n_pe_values,
                                    std::span<const int> n_b_values, int query_length, int reference_length,
                                    int path_len);

/// Least-squares slope of log(ys) against log(xs).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// True when successive slopes of ys over xs strictly decrease.
bool strictly_concave(std::span<const double> xs, std::span<const double> ys);

void write_csv(std::ostream& os, std::span<const SweepRow> rows);
std::string format_report(const CycleReport& report);

/// Published device configurations and measured throughput.
struct PublishedThroughput {
  int kernel_id;
  int n_pe;
  int n_b;
  int n_k;
  double clock_mhz;
  double alignments_per_second;
};

std::span<const PublishedThroughput> published_throughput();

inline constexpr int kPublishedSequenceLength = 256;

/// Single overhead (cycles) minimising the squared log error of modelled
/// against published throughput for the given rows.
int calibrate_overhead(std::span<const PublishedThroughput> rows, const EngineConfig& base, int query_length,
                       int reference_length, int path_len);

}  // namespace dphls
