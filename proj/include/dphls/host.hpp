#pragma once

#include "dphls/io.hpp"
#include "dphls/tiling.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dphls {

enum class RunMode { Align, Batch, Verify, Perf, Tile };

std::string_view to_string(RunMode mode);
std::optional<RunMode> mode_from_string(std::string_view name);

struct RunConfig {
  RunMode mode = RunMode::Align;
  std::string kernel = "1";
  ScoringParams params;
  EngineConfig engine;
  TilingPlan tiling;
  std::filesystem::path query_path;
  std::filesystem::path reference_path;
  std::filesystem::path out_path;  // empty: standard output
  std::filesystem::path matrix_path;
  std::filesystem::path emission_path;
  // perf mode
  int perf_query_length = 256;
  int perf_reference_length = 256;
  std::optional<int> perf_path_length;
  // verification fault injection: flips one stored pointer of the first pair
  std::optional<Coord> fault_cell;
};

/// Reads a JSON run description. Unknown keys are rejected. Throws
/// InvalidConfig or IoError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(std::string_view json_text);

/// Applies "name=value" to the scoring parameters. Throws InvalidConfig.
void set_param(ScoringParams& params, std::string_view assignment);

/// Resolves the kernel named in the config, honouring band and matrix files.
AnyKernel resolve_kernel(const RunConfig& config);

/// Loads the matrix/emission files referenced by the config into params.
ScoringParams resolve_params(const RunConfig& config, const AnyKernel& kernel);

struct BatchRow {
  std::string query_id;
  std::string reference_id;
  std::optional<AnyResult> result;
  ErrorCode status = ErrorCode::Ok;
  std::string message;
};

/// Loads both inputs (fail-fast), pairs record i with record i and aligns all
/// pairs over n_k channels. Throws on global failures only.
std::vector<BatchRow> run_batch(const RunConfig& config);

/// Tiles the first query/reference pair.
std::vector<BatchRow> run_tile(const RunConfig& config);

/// Tab-separated rows under a '#' header.
std::string format_rows(const std::vector<BatchRow>& rows);

struct VerifyReport {
  bool match = true;
  std::string text;  // "MATCH" or the first divergence
};

/// Engine against oracle on every pair: cells, stored pointers, score, path.
VerifyReport run_verify(const RunConfig& config);

/// Perf mode: one cycle report, plus the n_pe x n_b sweep as CSV.
std::string run_perf(const RunConfig& config, std::string* csv = nullptr);

}  // namespace dphls
