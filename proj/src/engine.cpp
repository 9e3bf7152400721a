#include "dphls/engine.hpp"

#include <algorithm>
#include <thread>

namespace dphls {

TbMemory::TbMemory(const ChunkSchedule& schedule) : schedule_(schedule) {
  const int chunks = schedule.chunk_count();
  chunk_base_.resize(static_cast<std::size_t>(chunks));
  int base = 0;
  for (int c = 0; c < chunks; ++c) {
    chunk_base_[static_cast<std::size_t>(c)] = base;
    base += schedule.wavefronts(c);
  }
  depth_ = base;
  banks_.assign(static_cast<std::size_t>(schedule.n_pe), std::vector<TracebackPointer>(static_cast<std::size_t>(base), 0));
}

namespace {

bool in_start_region(StartRegion region, Coord cell, int query_length, int reference_length) {
  switch (region) {
    case StartRegion::Corner: return cell.row == query_length - 1 && cell.col == reference_length - 1;
    case StartRegion::Anywhere: return true;
    case StartRegion::LastRow: return cell.row == query_length - 1;
    case StartRegion::LastRowOrColumn: return cell.row == query_length - 1 || cell.col == reference_length - 1;
  }
  return false;
}

void check_inputs(SymbolKind kind, const EngineConfig& config, SequenceView query, SequenceView reference) {
  if (query.empty() || reference.empty()) throw Error(ErrorCode::EmptySequence, "query and reference must be non-empty");
  if (static_cast<int>(query.size()) > config.max_query_length)
    throw Error(ErrorCode::SequenceTooLong, "query length " + std::to_string(query.size()) + " exceeds " +
                                                std::to_string(config.max_query_length));
  if (static_cast<int>(reference.size()) > config.max_reference_length)
    throw Error(ErrorCode::SequenceTooLong, "reference length " + std::to_string(reference.size()) + " exceeds " +
                                                std::to_string(config.max_reference_length));
  auto check = [kind](SequenceView seq, const char* which) {
    for (const auto& sym : seq)
      if (kind_of(sym) != kind)
        throw Error(ErrorCode::SymbolKindMismatch, std::string(which) + " holds " + std::string(to_string(kind_of(sym))) +
                                                       " symbols, kernel expects " + std::string(to_string(kind)));
  };
  check(query, "query");
  check(reference, "reference");
}

}  // namespace

template <class Scalar>
FillResult<Scalar> fill_matrix(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                               const ScoringParams& params, SequenceView query, SequenceView reference,
                               const FillObserver<Scalar>* observer) {
  require_valid(spec, params, config);
  check_inputs(spec.symbol_kind, config, query, reference);

  const int qlen = static_cast<int>(query.size());
  const int rlen = static_cast<int>(reference.size());
  FillResult<Scalar> result;
  result.schedule = {qlen, rlen, config.n_pe};
  result.band = effective_band(spec, config);
  const auto& schedule = result.schedule;
  const auto band = result.band;
  const bool store_tb = spec.has_traceback();
  if (store_tb) result.tb = TbMemory(schedule);

  const InitVectors<Scalar> init = spec.init(params, config.max_reference_length, config.max_query_length);
  const CellScores<Scalar> masked(spec.n_layers, worst<Scalar>(spec.policy.objective));
  auto row_init = [&](int j) -> const CellScores<Scalar>& {
    return in_band(band, -1, j) ? init.row[static_cast<std::size_t>(j)] : masked;
  };
  auto col_init = [&](int i) -> const CellScores<Scalar>& {
    return in_band(band, i, -1) ? init.col[static_cast<std::size_t>(i)] : masked;
  };

  const auto n_pe = static_cast<std::size_t>(config.n_pe);
  std::vector<CellScores<Scalar>> preserved(static_cast<std::size_t>(rlen), masked);
  std::vector<CellScores<Scalar>> out_prev(n_pe, masked), out_cur(n_pe, masked);
  std::vector<CellScores<Scalar>> up_reg(n_pe, masked);  // up input of the previous wavefront = next diag
  LocalMaxTracker<Scalar> tracker(config.n_pe, spec.policy.objective);

  for (int chunk = 0; chunk < schedule.chunk_count(); ++chunk) {
    const int first_row = schedule.row_begin(chunk);
    const int rows = schedule.rows(chunk);
    if (observer && observer->on_chunk_begin)
      observer->on_chunk_begin(chunk, std::span<const CellScores<Scalar>>(preserved));

    for (int w = 0; w < schedule.wavefronts(chunk); ++w) {
      if (observer && observer->on_wavefront) observer->on_wavefront(chunk, w);
      std::optional<std::pair<int, CellScores<Scalar>>> preserved_write;

      for (int pe = 0; pe < rows; ++pe) {
        const int j = w - pe;
        if (j < 0 || j >= rlen) continue;
        const int i = first_row + pe;
        const auto p = static_cast<std::size_t>(pe);

        const CellScores<Scalar> up = pe == 0 ? (chunk == 0 ? row_init(j) : preserved[static_cast<std::size_t>(j)])
                                              : out_prev[p - 1];
        const CellScores<Scalar> diag = j == 0 ? (i == 0 ? init.origin : col_init(i - 1)) : up_reg[p];
        const CellScores<Scalar>& left = j == 0 ? col_init(i) : out_prev[p];

        PeOutput<Scalar> out{masked, 0};
        if (in_band(band, i, j)) {
          out = spec.pe_func(up, diag, left, query[static_cast<std::size_t>(i)], reference[static_cast<std::size_t>(j)],
                             params, Coord{i, j});
          const Coord cell{i, j};
          if (in_start_region(spec.start_region, cell, qlen, rlen))
            tracker.offer(pe, spec.score_of(out.scores), cell, out.scores);
        }
        const int addr = store_tb ? result.tb.address(chunk, w) : 0;
        if (store_tb) result.tb.write(pe, addr, out.pointer);
        if (observer && observer->on_cell)
          observer->on_cell(CellEvent<Scalar>{chunk, w, pe, pe, addr, Coord{i, j}, up, diag, left, out});

        out_cur[p] = out.scores;
        up_reg[p] = up;
        if (pe == rows - 1) preserved_write.emplace(j, out.scores);
      }

      std::swap(out_prev, out_cur);
      if (preserved_write) preserved[static_cast<std::size_t>(preserved_write->first)] = preserved_write->second;
    }
  }

  result.best = tracker.reduce();
  if (!result.best.valid)
    throw Error(ErrorCode::TracebackOutOfBounds, "the band excludes every cell of the start region");
  return result;
}

template <class Scalar>
TracebackPath traceback(const KernelSpec<Scalar>& spec, const TbMemory& tb, Coord from, TracebackState state,
                        std::optional<int> band) {
  const int qlen = tb.schedule().query_length;
  const int rlen = tb.schedule().reference_length;
  const long limit = static_cast<long>(qlen) + rlen + 1;
  std::vector<TracebackMove> moves;
  std::vector<TracebackState> states;

  auto push = [&](TracebackMove move, TracebackState in_state) {
    if (static_cast<long>(moves.size()) >= limit)
      throw Error(ErrorCode::NonTerminating, "traceback exceeded " + std::to_string(limit) + " steps");
    moves.push_back(move);
    states.push_back(in_state);
  };

  const bool single_layer = spec.n_layers == 1;
  auto gap_state = [single_layer](TracebackMove move) {
    if (single_layer) return TracebackState::MM;
    return move == TracebackMove::INS ? TracebackState::INS : TracebackState::DEL;
  };

  Coord cell = from;
  while (true) {
    if (cell.row >= qlen || cell.col >= rlen || cell.row < -1 || cell.col < -1)
      throw Error(ErrorCode::TracebackOutOfBounds, "traceback left the matrix");
    if (!in_band(band, cell.row, cell.col))
      throw Error(ErrorCode::TracebackOutOfBounds,
                  "traceback left the band at (" + std::to_string(cell.row) + "," + std::to_string(cell.col) + ")");
    if (cell.row < 0 || cell.col < 0) break;

    const TbStep step = spec.tb_transition(state, tb.read(cell));
    if (step.move == TracebackMove::END) break;
    push(step.move, state);
    switch (step.move) {
      case TracebackMove::MMI: --cell.row; --cell.col; break;
      case TracebackMove::INS: --cell.col; break;
      case TracebackMove::DEL: --cell.row; break;
      case TracebackMove::END: break;
    }
    state = step.next;
  }

  // Boundary completion.
  const Strategy strategy = spec.policy.strategy;
  if (cell.row == -1 && cell.col >= 0 && strategy == Strategy::Global) {
    while (cell.col >= 0) {
      push(TracebackMove::INS, gap_state(TracebackMove::INS));
      --cell.col;
    }
  } else if (cell.col == -1 && cell.row >= 0 && (strategy == Strategy::Global || strategy == Strategy::SemiGlobal)) {
    while (cell.row >= 0) {
      push(TracebackMove::DEL, gap_state(TracebackMove::DEL));
      --cell.row;
    }
  }

  TracebackPath path;
  path.start = cell;
  path.moves.assign(moves.rbegin(), moves.rend());
  path.states.assign(states.rbegin(), states.rend());
  path.moves.push_back(TracebackMove::END);
  path.states.push_back(state);
  return path;
}

template <class Scalar>
AlignmentResult<Scalar> align(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                              const ScoringParams& params, SequenceView query, SequenceView reference,
                              const AlignOptions<Scalar>& options) {
  FillResult<Scalar> fill = fill_matrix(spec, config, params, query, reference, options.observer);
  if (options.flip_pointer && spec.has_traceback()) fill.tb.at(*options.flip_pointer) ^= 1u;

  AlignmentResult<Scalar> result;
  result.score = fill.best.score;
  result.end = fill.best.cell;
  result.layers_at_end = fill.best.layers;
  if (spec.has_traceback()) {
    TracebackPath path = traceback(spec, fill.tb, fill.best.cell, TracebackState::MM, fill.band);
    result.start = path.start;
    result.moves = std::move(path.moves);
    result.states = std::move(path.states);
  } else {
    result.start = result.end;
  }
  return result;
}

AnyResult align(const AnyKernel& spec, const EngineConfig& config, const ScoringParams& params, SequenceView query,
                SequenceView reference) {
  return std::visit([&](const auto& k) -> AnyResult { return align(k, config, params, query, reference); }, spec);
}

std::vector<BatchOutcome> align_batch(std::span<const BatchItem> items, const EngineConfig& config) {
  for (const auto& v : validate_config(config)) throw Error(v.code, v.detail);
  std::vector<BatchOutcome> outcomes(items.size());
  const auto channels = static_cast<std::size_t>(std::max(1, config.n_k));

  auto run_channel = [&](std::size_t channel) {
    for (std::size_t idx = channel; idx < items.size(); idx += channels) {
      const auto& item = items[idx];
      auto& outcome = outcomes[idx];
      try {
        if (!item.kernel || !item.params) throw Error(ErrorCode::InvalidConfig, "batch item lacks kernel or params");
        outcome.result = align(*item.kernel, config, *item.params, item.query, item.reference);
      } catch (const Error& e) {
        outcome.status = e.code();
        outcome.message = e.what();
      }
    }
  };

  if (channels == 1 || items.size() <= 1) {
    run_channel(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(channels);
    for (std::size_t ch = 0; ch < channels; ++ch) workers.emplace_back(run_channel, ch);
  }
  return outcomes;
}

template FillResult<Sat32> fill_matrix(const KernelSpec<Sat32>&, const EngineConfig&, const ScoringParams&,
                                       SequenceView, SequenceView, const FillObserver<Sat32>*);
template FillResult<double> fill_matrix(const KernelSpec<double>&, const EngineConfig&, const ScoringParams&,
                                        SequenceView, SequenceView, const FillObserver<double>*);
template TracebackPath traceback(const KernelSpec<Sat32>&, const TbMemory&, Coord, TracebackState,
                                 std::optional<int>);
template TracebackPath traceback(const KernelSpec<double>&, const TbMemory&, Coord, TracebackState,
                                 std::optional<int>);
template AlignmentResult<Sat32> align(const KernelSpec<Sat32>&, const EngineConfig&, const ScoringParams&,
                                      SequenceView, SequenceView, const AlignOptions<Sat32>&);
template AlignmentResult<double> align(const KernelSpec<double>&, const EngineConfig&, const ScoringParams&,
                                       SequenceView, SequenceView, const AlignOptions<double>&);

}  // namespace dphls
