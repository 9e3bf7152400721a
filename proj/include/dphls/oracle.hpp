#pragma once

#include "dphls/kernel_spec.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace dphls {

inline constexpr int kOracleMaxLength = 512;
inline constexpr int kEnumerationMaxTotal = 16;

/// Dense Q x R matrix of cell scores and pointers, plus a band mask.
template <class Scalar>
struct FullMatrix {
  int rows = 0;
  int cols = 0;
  int n_layers = 1;
  std::vector<CellScores<Scalar>> cells;
  std::vector<TracebackPointer> pointers;
  std::vector<char> computed;  // 0 for masked (out-of-band) cells

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j); }
  const CellScores<Scalar>& at(int i, int j) const { return cells[index(i, j)]; }
  TracebackPointer pointer(int i, int j) const { return pointers[index(i, j)]; }
  bool in_band(int i, int j) const { return computed[index(i, j)] != 0; }
};

template <class Scalar>
struct OracleResult {
  AlignmentResult<Scalar> result;
  FullMatrix<Scalar> matrix;
};

/// Plain row-major evaluation of the kernel's recurrences. Uses the kernel's
/// band unless one is passed. Throws OracleSizeExceeded past 512 symbols.
template <class Scalar>
OracleResult<Scalar> oracle_align(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                                  SequenceView reference);
template <class Scalar>
OracleResult<Scalar> oracle_align(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                                  SequenceView reference, std::optional<int> band);

/// Optimal score by brute force over every admissible path, with gap runs,
/// warping steps or pair-HMM states scored from the shipped kernel's model
/// (selected by id). Throws EnumerationSizeExceeded when Q + R > 16 and
/// UnknownKernel for ids outside 1..15.
template <class Scalar>
double enumerate_paths(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                       SequenceView reference);
template <class Scalar>
double enumerate_paths(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                       SequenceView reference, std::optional<int> band);

/// Hand-written recurrences over layer 0, independent of the kernel code.
struct ClosedForm {
  double score = 0.0;
  Eigen::MatrixXd cells;  // Q x R
};

ClosedForm needleman_wunsch(SequenceView query, SequenceView reference, const ScoringParams& params);
ClosedForm smith_waterman(SequenceView query, SequenceView reference, const ScoringParams& params);
ClosedForm dynamic_time_warping(SequenceView query, SequenceView reference, DistanceMetric metric);

/// Global affine score in linear memory (for pairs too long for FullMatrix).
long long gotoh_global_score(SequenceView query, SequenceView reference, const ScoringParams& params);

}  // namespace dphls
