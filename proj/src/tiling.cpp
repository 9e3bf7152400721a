#include "dphls/tiling.hpp"

#include <algorithm>

namespace dphls {

template <class Scalar>
Scalar rescore_path(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                    SequenceView reference, Coord start, std::span<const TracebackMove> moves) {
  const int qlen = static_cast<int>(query.size());
  const int rlen = static_cast<int>(reference.size());
  const InitVectors<Scalar> init = spec.init(params, rlen, qlen);
  const CellScores<Scalar> bad(spec.n_layers, worst<Scalar>(spec.policy.objective));

  auto boundary = [&](Coord c) -> CellScores<Scalar> {
    if (c.row < 0 && c.col < 0) return init.origin;
    if (c.row < 0) return init.row[static_cast<std::size_t>(c.col)];
    return init.col[static_cast<std::size_t>(c.row)];
  };

  Coord cell = start;
  CellScores<Scalar> current;
  if (cell.row < 0 || cell.col < 0) {
    current = boundary(cell);
  } else {
    // an interior start is a local restart
    current = bad;
    current[0] = ScoreTraits<Scalar>::zero();
  }

  for (TracebackMove mv : moves) {
    if (mv == TracebackMove::END) break;
    Coord next = cell;
    if (mv == TracebackMove::MMI) {
      ++next.row;
      ++next.col;
    } else if (mv == TracebackMove::INS) {
      ++next.col;
    } else {
      ++next.row;
    }
    if (next.row >= qlen || next.col >= rlen)
      throw Error(ErrorCode::TracebackOutOfBounds, "path runs past the end of a sequence");
    if (next.row < 0 || next.col < 0) {
      current = boundary(next);
    } else {
      const CellScores<Scalar>& up = mv == TracebackMove::DEL ? current : bad;
      const CellScores<Scalar>& diag = mv == TracebackMove::MMI ? current : bad;
      const CellScores<Scalar>& left = mv == TracebackMove::INS ? current : bad;
      current = spec.pe_func(up, diag, left, query[static_cast<std::size_t>(next.row)],
                             reference[static_cast<std::size_t>(next.col)], params, next)
                    .scores;
    }
    cell = next;
  }
  return spec.score_of(current);
}

template <class Scalar>
AlignmentResult<Scalar> run_tiled_alignment(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                                            const ScoringParams& params, SequenceView query, SequenceView reference,
                                            const TilingPlan& plan) {
  if (spec.policy.strategy != Strategy::Global)
    throw Error(ErrorCode::InvalidConfig, "tiling needs a global kernel");
  if (!(plan.overlap > 0 && plan.overlap < plan.tile_size))
    throw Error(ErrorCode::InvalidConfig, "tiling needs 0 < overlap < tile size");
  if (query.empty() || reference.empty()) throw Error(ErrorCode::EmptySequence, "query and reference must be non-empty");

  EngineConfig tile_config = config;
  tile_config.max_query_length = std::max(config.max_query_length, plan.tile_size);
  tile_config.max_reference_length = std::max(config.max_reference_length, plan.tile_size);

  const int qlen = static_cast<int>(query.size());
  const int rlen = static_cast<int>(reference.size());
  if (qlen <= plan.tile_size && rlen <= plan.tile_size) return align(spec, tile_config, params, query, reference);

  std::vector<TracebackMove> moves;
  std::vector<TracebackState> states;
  auto fill_gap = [&](TracebackMove m, int count) {
    moves.insert(moves.end(), static_cast<std::size_t>(count), m);
    const TracebackState st = spec.n_layers == 1 ? TracebackState::MM
                              : m == TracebackMove::INS ? TracebackState::INS
                                                        : TracebackState::DEL;
    states.insert(states.end(), static_cast<std::size_t>(count), st);
  };
  int qi = 0;
  int rj = 0;
  while (qi < qlen || rj < rlen) {
    if (qi == qlen) {
      fill_gap(TracebackMove::INS, rlen - rj);
      break;
    }
    if (rj == rlen) {
      fill_gap(TracebackMove::DEL, qlen - qi);
      break;
    }
    const int tq = std::min(plan.tile_size, qlen - qi);
    const int tr = std::min(plan.tile_size, rlen - rj);
    const bool q_edge = qi + tq == qlen;
    const bool r_edge = rj + tr == rlen;
    const auto tile = align(spec, tile_config, params, query.subspan(static_cast<std::size_t>(qi), static_cast<std::size_t>(tq)),
                            reference.subspan(static_cast<std::size_t>(rj), static_cast<std::size_t>(tr)));

    if (q_edge && r_edge) {
      for (std::size_t k = 0; k + 1 < tile.moves.size(); ++k) {
        moves.push_back(tile.moves[k]);
        states.push_back(tile.states[k]);
      }
      break;
    }

    // keep the prefix that stays clear of the overlap margin
    const int q_limit = q_edge ? tq : tq - plan.overlap;
    const int r_limit = r_edge ? tr : tr - plan.overlap;
    int used_q = 0;
    int used_r = 0;
    for (std::size_t k = 0; k + 1 < tile.moves.size(); ++k) {
      const TracebackMove m = tile.moves[k];
      const int dq = m == TracebackMove::INS ? 0 : 1;
      const int dr = m == TracebackMove::DEL ? 0 : 1;
      if (used_q + dq > q_limit || used_r + dr > r_limit) break;
      used_q += dq;
      used_r += dr;
      moves.push_back(m);
      states.push_back(tile.states[k]);
    }
    if (used_q == 0 && used_r == 0)
      throw Error(ErrorCode::TilingStalled, "tile at (" + std::to_string(qi) + "," + std::to_string(rj) +
                                                ") consumed nothing after truncation");
    qi += used_q;
    rj += used_r;
  }

  AlignmentResult<Scalar> out;
  out.start = {-1, -1};
  out.end = {qlen - 1, rlen - 1};
  out.moves = std::move(moves);
  out.moves.push_back(TracebackMove::END);
  out.score = rescore_path(spec, params, query, reference, out.start, out.moves);
  out.states = std::move(states);
  out.states.push_back(TracebackState::MM);
  return out;
}

template Sat32 rescore_path(const KernelSpec<Sat32>&, const ScoringParams&, SequenceView, SequenceView, Coord,
                            std::span<const TracebackMove>);
template double rescore_path(const KernelSpec<double>&, const ScoringParams&, SequenceView, SequenceView, Coord,
                             std::span<const TracebackMove>);
template AlignmentResult<Sat32> run_tiled_alignment(const KernelSpec<Sat32>&, const EngineConfig&,
                                                    const ScoringParams&, SequenceView, SequenceView,
                                                    const TilingPlan&);
template AlignmentResult<double> run_tiled_alignment(const KernelSpec<double>&, const EngineConfig&,
                                                     const ScoringParams&, SequenceView, SequenceView,
                                                     const TilingPlan&);

}  // namespace dphls
