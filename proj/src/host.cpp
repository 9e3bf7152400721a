#include "dphls/host.hpp"

#include "dphls/kernels.hpp"
#include "dphls/oracle.hpp"
#include "dphls/perf.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <iomanip>
#include <sstream>

namespace dphls {

using nlohmann::json;

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Align: return "align";
    case RunMode::Batch: return "batch";
    case RunMode::Verify: return "verify";
    case RunMode::Perf: return "perf";
    case RunMode::Tile: return "tile";
  }
  return "?";
}

std::optional<RunMode> mode_from_string(std::string_view name) {
  for (RunMode m : {RunMode::Align, RunMode::Batch, RunMode::Verify, RunMode::Perf, RunMode::Tile})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

// ---------------------------------------------------------------- config

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::InvalidConfig, what); }

int json_int(const json& v, const char* key) {
  if (!v.is_number_integer()) throw config_error(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

void read_params(const json& j, RunConfig& cfg) {
  if (!j.is_object()) throw config_error("'params' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "emission" && value.is_array()) {
      Eigen::Matrix<double, 5, 5> m;
      if (value.size() != 5) throw Error(ErrorCode::MatrixShapeMismatch, "emission needs 5 rows");
      for (int r = 0; r < 5; ++r) {
        const auto& row = value[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 5) throw Error(ErrorCode::MatrixShapeMismatch, "emission needs 5 columns");
        for (int c = 0; c < 5; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
      cfg.params.emission = m;
    } else if (key == "emission") {
      cfg.emission_path = value.get<std::string>();
    } else if (key == "substitution_matrix") {
      cfg.matrix_path = value.get<std::string>();
    } else if (value.is_string()) {
      set_param(cfg.params, key + "=" + value.get<std::string>());
    } else if (value.is_number()) {
      std::ostringstream os;
      os << std::setprecision(17) << value.get<double>();
      set_param(cfg.params, key + "=" + os.str());
    } else {
      throw config_error("bad value for parameter '" + key + "'");
    }
  }
}

void read_engine(const json& j, EngineConfig& e) {
  if (!j.is_object()) throw config_error("'engine' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n_pe") e.n_pe = json_int(value, "n_pe");
    else if (key == "n_b") e.n_b = json_int(value, "n_b");
    else if (key == "n_k") e.n_k = json_int(value, "n_k");
    else if (key == "ii") e.ii = json_int(value, "ii");
    else if (key == "max_reference_length") e.max_reference_length = json_int(value, "max_reference_length");
    else if (key == "max_query_length") e.max_query_length = json_int(value, "max_query_length");
    else if (key == "band_width") e.band_width = json_int(value, "band_width");
    else if (key == "clock_mhz") e.clock_mhz = value.get<double>();
    else if (key == "pipeline_depth") e.pipeline_depth = json_int(value, "pipeline_depth");
    else if (key == "fixed_overhead_cycles") e.fixed_overhead_cycles = json_int(value, "fixed_overhead_cycles");
    else throw config_error("unknown engine key '" + key + "'");
  }
}

}  // namespace

RunConfig run_config_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config must be a JSON object");

  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "mode") {
        const auto m = mode_from_string(value.get<std::string>());
        if (!m) throw config_error("unknown mode '" + value.get<std::string>() + "'");
        cfg.mode = *m;
      } else if (key == "kernel") {
        cfg.kernel = value.is_number_integer() ? std::to_string(value.get<int>()) : value.get<std::string>();
      } else if (key == "query") {
        cfg.query_path = value.get<std::string>();
      } else if (key == "reference") {
        cfg.reference_path = value.get<std::string>();
      } else if (key == "out") {
        cfg.out_path = value.get<std::string>();
      } else if (key == "params") {
        read_params(value, cfg);
      } else if (key == "engine") {
        read_engine(value, cfg.engine);
      } else if (key == "tiling") {
        if (value.contains("tile_size")) cfg.tiling.tile_size = json_int(value["tile_size"], "tile_size");
        if (value.contains("overlap")) cfg.tiling.overlap = json_int(value["overlap"], "overlap");
      } else if (key == "perf") {
        if (value.contains("query_length")) cfg.perf_query_length = json_int(value["query_length"], "query_length");
        if (value.contains("reference_length"))
          cfg.perf_reference_length = json_int(value["reference_length"], "reference_length");
        if (value.contains("path_length")) cfg.perf_path_length = json_int(value["path_length"], "path_length");
      } else {
        throw config_error("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_file(path)); }

void set_param(ScoringParams& params, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw config_error("parameter '" + std::string(assignment) + "' lacks '='");
  const std::string_view name = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);
  const auto p = param_from_string(name);
  if (!p) throw config_error("unknown parameter '" + std::string(name) + "'");
  if (*p == ParamName::DistanceMetric) {
    const auto m = metric_from_string(value);
    if (!m) throw config_error("unknown distance metric '" + std::string(value) + "'");
    params.distance_metric = *m;
    return;
  }
  auto* slot = params.scalar(*p);
  if (!slot) throw config_error("parameter '" + std::string(name) + "' takes a file, not a value");
  double v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw config_error("parameter '" + std::string(name) + "' needs a number");
  *slot = v;
}

AnyKernel resolve_kernel(const RunConfig& config) { return find_kernel(config.kernel); }

ScoringParams resolve_params(const RunConfig& config, const AnyKernel&) {
  ScoringParams p = config.params;
  if (!config.matrix_path.empty()) p.substitution_matrix = parse_matrix(config.matrix_path);
  if (!config.emission_path.empty()) {
    const Eigen::MatrixXd m = parse_matrix(config.emission_path);
    if (m.rows() != 5) throw Error(ErrorCode::MatrixShapeMismatch, "emission matrix must be 5x5");
    p.emission = m;
  }
  return p;
}

// ---------------------------------------------------------------- batch

namespace {

struct LoadedInputs {
  AnyKernel kernel;
  ScoringParams params;
  std::vector<SequenceRecord> queries;
  std::vector<SequenceRecord> references;
};

LoadedInputs load_inputs(const RunConfig& config) {
  for (const auto& v : validate_config(config.engine)) throw Error(v.code, v.detail);
  LoadedInputs in{resolve_kernel(config), {}, {}, {}};
  in.params = resolve_params(config, in.kernel);
  const SymbolKind kind = kernel_symbol_kind(in.kernel);
  if (config.query_path.empty() || config.reference_path.empty())
    throw config_error("both --query and --reference are required");
  in.queries = load_sequences(config.query_path, kind);
  in.references = load_sequences(config.reference_path, kind);
  if (in.queries.size() != in.references.size())
    throw config_error("query and reference files hold " + std::to_string(in.queries.size()) + " and " +
                       std::to_string(in.references.size()) + " records");
  if (kind == SymbolKind::ProfileColumn)
    for (auto* set : {&in.queries, &in.references})
      for (auto& rec : *set)
        for (auto& sym : rec.symbols) sym = normalized(std::get<ProfileColumn>(sym));
  std::visit([&](const auto& k) { require_valid(k, in.params, config.engine); }, in.kernel);
  return in;
}

std::string format_score(const AnyResult& r) {
  return std::visit(
      [](const auto& res) -> std::string {
        using S = std::decay_t<decltype(res.score)>;
        if constexpr (std::is_same_v<S, Sat32>) {
          return std::to_string(res.score.value());
        } else {
          std::ostringstream os;
          os << std::setprecision(17) << res.score;
          return os.str();
        }
      },
      r);
}

std::string format_coord(Coord c) { return std::to_string(c.row) + "," + std::to_string(c.col); }

}  // namespace

std::vector<BatchRow> run_batch(const RunConfig& config) {
  const LoadedInputs in = load_inputs(config);
  std::vector<BatchItem> items;
  items.reserve(in.queries.size());
  for (std::size_t k = 0; k < in.queries.size(); ++k)
    items.push_back({&in.kernel, &in.params, in.queries[k].symbols, in.references[k].symbols});

  EngineConfig engine = config.engine;
  if (config.mode == RunMode::Align) engine.n_k = 1;
  const auto outcomes = align_batch(items, engine);

  std::vector<BatchRow> rows;
  rows.reserve(outcomes.size());
  for (std::size_t k = 0; k < outcomes.size(); ++k)
    rows.push_back({in.queries[k].id, in.references[k].id, outcomes[k].result, outcomes[k].status, outcomes[k].message});
  return rows;
}

std::vector<BatchRow> run_tile(const RunConfig& config) {
  RunConfig relaxed = config;
  relaxed.engine.max_query_length = std::max(config.engine.max_query_length, config.tiling.tile_size);
  relaxed.engine.max_reference_length = std::max(config.engine.max_reference_length, config.tiling.tile_size);
  const LoadedInputs in = load_inputs(relaxed);
  BatchRow row{in.queries.front().id, in.references.front().id, std::nullopt, ErrorCode::Ok, {}};
  try {
    row.result = std::visit(
        [&](const auto& k) -> AnyResult {
          return run_tiled_alignment(k, relaxed.engine, in.params, in.queries.front().symbols,
                                     in.references.front().symbols, config.tiling);
        },
        in.kernel);
  } catch (const Error& e) {
    row.status = e.code();
    row.message = e.what();
  }
  return {row};
}

std::string format_rows(const std::vector<BatchRow>& rows) {
  std::string out = "#id_q\tid_r\tscore\tstart\tend\tcigar\tstatus\n";
  for (const auto& row : rows) {
    out += row.query_id + '\t' + row.reference_id + '\t';
    if (row.result) {
      const auto& r = *row.result;
      const auto [start, end, cigar] = std::visit(
          [](const auto& res) { return std::tuple{res.start, res.end, to_cigar(res.moves)}; }, r);
      out += format_score(r) + '\t' + format_coord(start) + '\t' + format_coord(end) + '\t' + cigar + "\tOK\n";
    } else {
      out += "NA\tNA\tNA\t*\t" + std::string(to_string(row.status)) + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------- verify

namespace {

template <class Scalar>
std::string format_value(Scalar v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class Scalar>
std::optional<std::string> verify_pair(const KernelSpec<Scalar>& spec, const EngineConfig& engine,
                                       const ScoringParams& params, SequenceView query, SequenceView reference,
                                       std::optional<Coord> fault) {
  const auto oracle = oracle_align(spec, params, query, reference, effective_band(spec, engine));
  const auto& om = oracle.matrix;
  auto same = [](Scalar a, Scalar b) { return scores_equal(a, b); };
  auto where = [](int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; };

  if (!spec.has_traceback()) {
    const auto res = align(spec, engine, params, query, reference);
    if (!same(res.score, oracle.result.score))
      return "score engine=" + format_value(res.score) + " oracle=" + format_value(oracle.result.score);
    if (!(res.end == oracle.result.end))
      return "end cell engine=" + where(res.end.row, res.end.col) + " oracle=" +
             where(oracle.result.end.row, oracle.result.end.col);
    return std::nullopt;
  }

  std::vector<CellScores<Scalar>> cells(om.cells.size());
  std::vector<char> seen(om.cells.size(), 0);
  FillObserver<Scalar> obs;
  obs.on_cell = [&](const CellEvent<Scalar>& ev) {
    const auto idx = om.index(ev.cell.row, ev.cell.col);
    cells[idx] = ev.out.scores;
    seen[idx] = 1;
  };
  auto fill = fill_matrix(spec, engine, params, query, reference, &obs);
  if (fault) fill.tb.at(*fault) ^= 1u;

  for (int i = 0; i < om.rows; ++i)
    for (int j = 0; j < om.cols; ++j) {
      if (!om.in_band(i, j)) continue;
      const auto idx = om.index(i, j);
      for (int l = 0; l < spec.n_layers; ++l)
        if (!seen[idx] || !same(cells[idx][l], om.cells[idx][l]))
          return "cell " + where(i, j) + " layer " + std::to_string(l) + " engine=" + format_value(cells[idx][l]) +
                 " oracle=" + format_value(om.cells[idx][l]);
    }
  for (int i = 0; i < om.rows; ++i)
    for (int j = 0; j < om.cols; ++j) {
      if (!om.in_band(i, j)) continue;
      const int got = fill.tb.read({i, j});
      const int want = om.pointer(i, j);
      if (got != want)
        return "pointer " + where(i, j) + " engine=" + std::to_string(got) + " oracle=" + std::to_string(want);
    }
  if (!same(fill.best.score, oracle.result.score))
    return "score engine=" + format_value(fill.best.score) + " oracle=" + format_value(oracle.result.score);

  TracebackPath path;
  try {
    path = traceback(spec, fill.tb, fill.best.cell, TracebackState::MM, fill.band);
  } catch (const Error& e) {
    return std::string("engine traceback failed: ") + e.what();
  }
  const auto& want = oracle.result.moves;
  const std::size_t n = std::min(path.moves.size(), want.size());
  for (std::size_t k = 0; k < n; ++k)
    if (path.moves[k] != want[k]) return "path element " + std::to_string(k) + " differs";
  if (path.moves.size() != want.size()) return "path length engine=" + std::to_string(path.moves.size()) +
                                               " oracle=" + std::to_string(want.size());
  return std::nullopt;
}

}  // namespace

VerifyReport run_verify(const RunConfig& config) {
  const LoadedInputs in = load_inputs(config);
  VerifyReport report;
  for (std::size_t k = 0; k < in.queries.size(); ++k) {
    const auto fault = k == 0 ? config.fault_cell : std::nullopt;
    const auto diff = std::visit(
        [&](const auto& spec) {
          return verify_pair(spec, config.engine, in.params, in.queries[k].symbols, in.references[k].symbols, fault);
        },
        in.kernel);
    if (diff) {
      report.match = false;
      report.text = "DIVERGENCE pair " + std::to_string(k) + " (" + in.queries[k].id + "): " + *diff;
      return report;
    }
  }
  report.text = "MATCH";
  return report;
}

// ---------------------------------------------------------------- perf

std::string run_perf(const RunConfig& config, std::string* csv) {
  const int qlen = config.perf_query_length;
  const int rlen = config.perf_reference_length;
  const int path_len = config.perf_path_length.value_or(std::max(qlen, rlen));
  const CycleReport report = model_alignment_cycles(config.engine, qlen, rlen, path_len);
  if (csv) {
    static constexpr std::array<int, 7> n_pe_values{1, 2, 4, 8, 16, 32, 64};
    static constexpr std::array<int, 5> n_b_values{1, 2, 4, 8, 16};
    std::ostringstream os;
    write_csv(os, scaling_sweep(config.engine, n_pe_values, n_b_values, qlen, rlen, path_len));
    *csv = os.str();
  }
  return format_report(report);
}

}  // namespace dphls
