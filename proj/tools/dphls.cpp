#include "dphls/host.hpp"
#include "dphls/kernels.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kMismatch = 3 };

int exit_code_for(dphls::ErrorCode code) {
  using dphls::ErrorCode;
  switch (code) {
    case ErrorCode::MalformedFasta:
    case ErrorCode::EmptyFile:
    case ErrorCode::MalformedSample:
    case ErrorCode::MatrixShapeMismatch:
    case ErrorCode::UnknownResidue:
    case ErrorCode::InvalidCharacter:
    case ErrorCode::EmptySequence:
    case ErrorCode::ProfileLengthMismatch:
    case ErrorCode::IoError:
      return kInput;
    default:
      return kUsage;
  }
}

void emit(const dphls::RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw dphls::Error(dphls::ErrorCode::IoError, "cannot write " + cfg.out_path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generic 2-D dynamic-programming aligner with a wavefront engine"};
  std::string mode_name;
  std::string config_path, kernel, query, reference, out, matrix, emission;
  std::vector<std::string> params;
  std::optional<int> n_pe, n_b, n_k, ii, band, tile, overlap, max_len, qlen, rlen, path_len;
  std::optional<double> clock;
  std::vector<int> fault;

  app.add_option("mode", mode_name, "align | batch | verify | perf | tile")->required();
  app.add_option("--config", config_path, "JSON run description");
  app.add_option("--kernel", kernel, "kernel id (1-15) or name");
  app.add_option("--query", query, "query FASTA or sample file");
  app.add_option("--reference", reference, "reference FASTA or sample file");
  app.add_option("--out", out, "output path (default: stdout)");
  app.add_option("--params", params, "scoring parameters as name=value")->expected(0, -1);
  app.add_option("--matrix", matrix, "substitution matrix file");
  app.add_option("--emission", emission, "5x5 emission matrix file");
  app.add_option("--npe", n_pe, "processing elements per block");
  app.add_option("--nb", n_b, "blocks per channel");
  app.add_option("--nk", n_k, "channels");
  app.add_option("--ii", ii, "initiation interval");
  app.add_option("--band", band, "band width");
  app.add_option("--tile", tile, "tile size");
  app.add_option("--overlap", overlap, "tile overlap");
  app.add_option("--max-length", max_len, "maximum query and reference length");
  app.add_option("--clock", clock, "clock in MHz (perf)");
  app.add_option("--qlen", qlen, "query length (perf)");
  app.add_option("--rlen", rlen, "reference length (perf)");
  app.add_option("--path-len", path_len, "traceback path length (perf)");
  app.add_option("--fault", fault, "verify: flip the pointer stored at ROW COL of the first pair")->expected(2);
  app.add_flag_function("--list-kernels", [](std::int64_t) {
    for (const auto& [id, k] : dphls::kernel_catalog()) std::cout << id << '\t' << dphls::kernel_name(k) << '\n';
    std::exit(kOk);
  }, "print the kernel catalog and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    dphls::RunConfig cfg = config_path.empty() ? dphls::RunConfig{} : dphls::load_run_config(config_path);
    const auto mode = dphls::mode_from_string(mode_name);
    if (!mode) {
      std::cerr << "unknown mode '" << mode_name << "'\n";
      return kUsage;
    }
    cfg.mode = *mode;
    if (!kernel.empty()) cfg.kernel = kernel;
    if (!query.empty()) cfg.query_path = query;
    if (!reference.empty()) cfg.reference_path = reference;
    if (!out.empty()) cfg.out_path = out;
    if (!matrix.empty()) cfg.matrix_path = matrix;
    if (!emission.empty()) cfg.emission_path = emission;
    for (const auto& p : params) dphls::set_param(cfg.params, p);
    if (n_pe) cfg.engine.n_pe = *n_pe;
    if (n_b) cfg.engine.n_b = *n_b;
    if (n_k) cfg.engine.n_k = *n_k;
    if (ii) cfg.engine.ii = *ii;
    if (band) cfg.engine.band_width = *band;
    if (clock) cfg.engine.clock_mhz = *clock;
    if (max_len) cfg.engine.max_query_length = cfg.engine.max_reference_length = *max_len;
    if (tile) cfg.tiling.tile_size = *tile;
    if (overlap) cfg.tiling.overlap = *overlap;
    if (qlen) cfg.perf_query_length = *qlen;
    if (rlen) cfg.perf_reference_length = *rlen;
    if (path_len) cfg.perf_path_length = *path_len;
    if (fault.size() == 2) cfg.fault_cell = dphls::Coord{fault[0], fault[1]};

    switch (cfg.mode) {
      case dphls::RunMode::Align:
      case dphls::RunMode::Batch:
        emit(cfg, dphls::format_rows(dphls::run_batch(cfg)));
        return kOk;
      case dphls::RunMode::Tile:
        emit(cfg, dphls::format_rows(dphls::run_tile(cfg)));
        return kOk;
      case dphls::RunMode::Verify: {
        const auto report = dphls::run_verify(cfg);
        emit(cfg, report.text + '\n');
        return report.match ? kOk : kMismatch;
      }
      case dphls::RunMode::Perf: {
        std::string csv;
        const std::string text = dphls::run_perf(cfg, cfg.out_path.empty() ? nullptr : &csv);
        std::cout << text;
        if (!cfg.out_path.empty()) emit(cfg, csv);
        return kOk;
      }
    }
  } catch (const dphls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kOk;
}
