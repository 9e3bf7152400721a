#pragma once

#include "dphls/kernel_spec.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dphls {

/// Row partition of the DP matrix into chunks of n_pe consecutive query rows.
struct ChunkSchedule {
  int query_length = 0;
  int reference_length = 0;
  int n_pe = 1;

  int chunk_count() const { return (query_length + n_pe - 1) / n_pe; }
  int row_begin(int chunk) const { return chunk * n_pe; }
  int row_end(int chunk) const { return std::min((chunk + 1) * n_pe, query_length); }
  int rows(int chunk) const { return row_end(chunk) - row_begin(chunk); }
  /// Anti-diagonals swept while the chunk is resident in the array.
  int wavefronts(int chunk) const { return reference_length + rows(chunk) - 1; }
};

/// Banked traceback storage: one bank per PE (bank = row mod n_pe) and
/// consecutive wavefronts of a chunk at consecutive addresses, so every PE
/// writes the same address of its own bank in a given wavefront.
class TbMemory {
 public:
  TbMemory() = default;
  explicit TbMemory(const ChunkSchedule& schedule);

  const ChunkSchedule& schedule() const { return schedule_; }
  int banks() const { return static_cast<int>(banks_.size()); }
  int depth() const { return depth_; }

  int bank_of(int row) const { return row % schedule_.n_pe; }
  int address(int chunk, int wavefront) const { return chunk_base_[static_cast<std::size_t>(chunk)] + wavefront; }
  int address_of(Coord cell) const {
    const int pe = bank_of(cell.row);
    return address(cell.row / schedule_.n_pe, cell.col + pe);
  }

  void write(int bank, int addr, TracebackPointer ptr) {
    banks_[static_cast<std::size_t>(bank)][static_cast<std::size_t>(addr)] = ptr;
  }
  TracebackPointer read(Coord cell) const {
    return banks_[static_cast<std::size_t>(bank_of(cell.row))][static_cast<std::size_t>(address_of(cell))];
  }
  TracebackPointer& at(Coord cell) {
    return banks_[static_cast<std::size_t>(bank_of(cell.row))][static_cast<std::size_t>(address_of(cell))];
  }

 private:
  ChunkSchedule schedule_;
  std::vector<int> chunk_base_;
  std::vector<std::vector<TracebackPointer>> banks_;
  int depth_ = 0;
};

template <class Scalar>
struct BestCell {
  bool valid = false;
  Scalar score{};
  Coord cell{};
  CellScores<Scalar> layers;
};

/// Per-PE running optimum over the policy's start region. Ties resolve to the
/// smallest reference index, then the smallest query index.
template <class Scalar>
class LocalMaxTracker {
 public:
  LocalMaxTracker(int n_pe, Objective objective) : per_pe_(static_cast<std::size_t>(n_pe)), objective_(objective) {}

  void offer(int pe, Scalar score, Coord cell, const CellScores<Scalar>& layers) {
    auto& slot = per_pe_[static_cast<std::size_t>(pe)];
    if (!slot.valid || preferred(score, cell, slot)) slot = {true, score, cell, layers};
  }

  const BestCell<Scalar>& local(int pe) const { return per_pe_[static_cast<std::size_t>(pe)]; }
  int size() const { return static_cast<int>(per_pe_.size()); }

  /// Reduction across PEs.
  BestCell<Scalar> reduce() const {
    BestCell<Scalar> best;
    for (const auto& slot : per_pe_)
      if (slot.valid && (!best.valid || preferred(slot.score, slot.cell, best))) best = slot;
    return best;
  }

 private:
  bool preferred(Scalar score, Coord cell, const BestCell<Scalar>& than) const {
    if (better(objective_, score, than.score)) return true;
    if (!(score == than.score)) return false;
    return cell.col < than.cell.col || (cell.col == than.cell.col && cell.row < than.cell.row);
  }

  std::vector<BestCell<Scalar>> per_pe_;
  Objective objective_;
};

/// One PE evaluation, as seen by instrumentation.
template <class Scalar>
struct CellEvent {
  int chunk;
  int wavefront;
  int pe;
  int bank;
  int address;
  Coord cell;
  const CellScores<Scalar>& up;
  const CellScores<Scalar>& diag;
  const CellScores<Scalar>& left;
  const PeOutput<Scalar>& out;
};

/// Optional hooks into the fill loop (tests, verification).
template <class Scalar>
struct FillObserver {
  std::function<void(int chunk, std::span<const CellScores<Scalar>> preserved_row)> on_chunk_begin;
  std::function<void(int chunk, int wavefront)> on_wavefront;
  std::function<void(const CellEvent<Scalar>&)> on_cell;
};

template <class Scalar>
struct FillResult {
  ChunkSchedule schedule;
  std::optional<int> band;
  TbMemory tb;  // empty when the kernel has no traceback
  BestCell<Scalar> best;
};

/// Matrix fill in wavefront order over row chunks. Throws EmptySequence,
/// SequenceTooLong, SymbolKindMismatch or a validation error.
template <class Scalar>
FillResult<Scalar> fill_matrix(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                               const ScoringParams& params, SequenceView query, SequenceView reference,
                               const FillObserver<Scalar>* observer = nullptr);

struct TracebackPath {
  std::vector<TracebackMove> moves;  // forward order, END-terminated
  std::vector<TracebackState> states;
  Coord start{};
};

/// Walks pointers from `from` until END or the strategy's boundary condition.
/// Throws TracebackOutOfBounds or NonTerminating.
template <class Scalar>
TracebackPath traceback(const KernelSpec<Scalar>& spec, const TbMemory& tb, Coord from, TracebackState state,
                        std::optional<int> band = std::nullopt);

template <class Scalar>
struct AlignOptions {
  const FillObserver<Scalar>* observer = nullptr;
  std::optional<Coord> flip_pointer;  // fault injection: XOR bit 0 of one stored pointer
};

template <class Scalar>
AlignmentResult<Scalar> align(const KernelSpec<Scalar>& spec, const EngineConfig& config,
                              const ScoringParams& params, SequenceView query, SequenceView reference,
                              const AlignOptions<Scalar>& options = {});

AnyResult align(const AnyKernel& spec, const EngineConfig& config, const ScoringParams& params, SequenceView query,
                SequenceView reference);

struct BatchItem {
  const AnyKernel* kernel = nullptr;
  const ScoringParams* params = nullptr;
  SequenceView query;
  SequenceView reference;
};

struct BatchOutcome {
  std::optional<AnyResult> result;
  ErrorCode status = ErrorCode::Ok;
  std::string message;
};

/// Independent alignments over n_k concurrent channels (pair i goes to channel
/// i mod n_k), each channel issuing groups of n_b pairs. Results are positional;
/// a failing pair reports its error without affecting the others.
std::vector<BatchOutcome> align_batch(std::span<const BatchItem> items, const EngineConfig& config);

}  // namespace dphls
