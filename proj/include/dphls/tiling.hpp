#pragma once

#include "dphls/engine.hpp"

namespace dphls {

struct TilingPlan {
  int tile_size = 256;
  int overlap = 32;
};

/// Score of a fixed path under the kernel's own recurrences: each cell on the
/// path is evaluated with only its path predecessor as a neighbour. `start`
/// is where the path begins (the origin for global kernels); `moves` is in
/// forward order and may end with END.
template <class Scalar>
Scalar rescore_path(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                    SequenceView reference, Coord start, std::span<const TracebackMove> moves);

/// Chains T x T tiles along the diagonal. Every tile but the last keeps only
/// the prefix of its path that stays O symbols clear of the tile's far edges;
/// the next tile starts where that prefix ends. The stitched score is the
/// rescored stitched path. Throws InvalidConfig for non-global kernels or bad
/// tile parameters, TilingStalled when a tile makes no progress.
template <class Scalar>
AlignmentResult<Scalar> run_tiled_alignment(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                                            const ScoringParams& params, SequenceView query, SequenceView reference,
                                            const TilingPlan& plan = {});

}  // namespace dphls
