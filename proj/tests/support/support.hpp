#pragma once

// Shared helpers for the unit and acceptance tests. Path rescoring here is
// written from the scoring definitions alone and does not call library code.

#include "dphls/engine.hpp"
#include "dphls/io.hpp"
#include "dphls/kernels.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace dphls;

#ifndef DPHLS_TEST_DATA
#define DPHLS_TEST_DATA "tests/data"
#endif

inline std::string data_path(const std::string& name) { return std::string(DPHLS_TEST_DATA) + "/" + name; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline const Eigen::MatrixXd& blosum62() {
  static const Eigen::MatrixXd m = parse_matrix(data_path("BLOSUM62"));
  return m;
}

inline Symbol random_symbol(Rng& rng, SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Nucleotide: return Nucleotide{static_cast<std::uint8_t>(rng.uniform(0, 3))};
    case SymbolKind::AmbiguousNucleotide: return AmbiguousNucleotide{static_cast<std::uint8_t>(rng.uniform(0, 4))};
    case SymbolKind::AminoAcid: return AminoAcid{static_cast<std::uint8_t>(rng.uniform(0, 19))};
    case SymbolKind::ProfileColumn: {
      ProfileColumn c;
      for (int k = 0; k < 5; ++k) c.freq(k) = rng.coin(0.3) ? 0.0 : rng.real(0.0, 1.0);
      if (c.freq.sum() == 0.0) c.freq(rng.uniform(0, 4)) = 1.0;
      return normalized(c);
    }
    case SymbolKind::ComplexSample: return ComplexSample{rng.real(-4.0, 4.0), rng.real(-4.0, 4.0)};
    case SymbolKind::IntSample: return IntSample{rng.uniform(-20, 20)};
  }
  return Nucleotide{};
}

inline Sequence random_sequence(Rng& rng, SymbolKind kind, int length) {
  Sequence s;
  for (int k = 0; k < length; ++k) s.push_back(random_symbol(rng, kind));
  return s;
}

/// Copy of `seq` with substitutions, insertions and deletions at `rate`.
inline Sequence mutate(Rng& rng, const Sequence& seq, SymbolKind kind, double rate, int max_length) {
  Sequence out;
  for (const auto& s : seq) {
    if (!rng.coin(rate)) {
      out.push_back(s);
      continue;
    }
    switch (rng.uniform(0, 2)) {
      case 0: out.push_back(random_symbol(rng, kind)); break;
      case 1:
        out.push_back(s);
        out.push_back(random_symbol(rng, kind));
        break;
      default: break;
    }
  }
  if (out.empty()) out.push_back(random_symbol(rng, kind));
  if (static_cast<int>(out.size()) > max_length) out.resize(static_cast<std::size_t>(max_length));
  return out;
}

struct Pair {
  Sequence query;
  Sequence reference;
};

/// Half unrelated, half related (mutated) pairs with lengths in [1, max_length].
inline Pair random_pair(Rng& rng, SymbolKind kind, int max_length) {
  Pair p;
  p.query = random_sequence(rng, kind, rng.uniform(1, max_length));
  if (rng.coin())
    p.reference = mutate(rng, p.query, kind, rng.real(0.05, 0.4), max_length);
  else
    p.reference = random_sequence(rng, kind, rng.uniform(1, max_length));
  if (rng.coin()) std::swap(p.query, p.reference);
  return p;
}

/// Random scoring parameters for a catalog kernel.
inline ScoringParams random_params(Rng& rng, int id) {
  ScoringParams p;
  auto dna = [&] {
    p.match = rng.uniform(1, 5);
    p.mismatch = rng.uniform(-5, -1);
  };
  switch (id) {
    case 1: case 3: case 6: case 7: case 11:
      dna();
      p.linear_gap = rng.uniform(-5, -1);
      break;
    case 2: case 4: case 12:
      dna();
      p.gap_open = rng.uniform(-6, 0);
      p.gap_extend = rng.uniform(-3, -1);
      break;
    case 5: case 13:
      dna();
      p.gap_open = rng.uniform(-6, -2);
      p.gap_extend = rng.uniform(-4, -2);
      p.gap_open2 = rng.uniform(-24, -10);
      p.gap_extend2 = -1;
      break;
    case 8: {
      Eigen::MatrixXd m(5, 5);
      for (int a = 0; a < 5; ++a)
        for (int b = a; b < 5; ++b) m(a, b) = m(b, a) = a == b ? rng.real(1.0, 4.0) : rng.real(-3.0, 1.0);
      p.substitution_matrix = m;
      p.gap_open = rng.real(-4.0, 0.0);
      p.gap_extend = rng.real(-2.0, -0.1);
      break;
    }
    case 9: p.distance_metric = rng.coin() ? DistanceMetric::Manhattan : DistanceMetric::Euclidean; break;
    case 10: {
      Eigen::Matrix<double, 5, 5> e;
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) e(a, b) = rng.real(-6.0, -0.1);
      p.emission = e;
      p.log_mu = rng.real(-4.0, -0.5);
      p.log_lambda = rng.real(-2.0, -0.05);
      break;
    }
    case 14: break;
    case 15:
      p.substitution_matrix = blosum62();
      p.linear_gap = rng.uniform(-8, -1);
      break;
    default: break;
  }
  return p;
}

template <class Scalar>
double as_double(Scalar s) {
  return ScoreTraits<Scalar>::to_double(s);
}

inline bool close(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Score of a traceback path re-accumulated from the scoring rules of the
/// catalog kernel `id`. `start` is the cell the walk stopped at.
inline std::optional<double> rescore(int id, const ScoringParams& p, const Sequence& q, const Sequence& r, Coord start,
                                     const std::vector<TracebackMove>& moves) {
  if (id == 10) return std::nullopt;
  int i = start.row;
  int j = start.col;
  double total = 0.0;

  if (id == 9 || id == 14) {
    for (auto m : moves) {
      if (m == TracebackMove::END) break;
      if (m != TracebackMove::INS) ++i;
      if (m != TracebackMove::DEL) ++j;
      if (id == 9) {
        const auto& a = std::get<ComplexSample>(q[static_cast<std::size_t>(i)]);
        const auto& b = std::get<ComplexSample>(r[static_cast<std::size_t>(j)]);
        const double dr = a.re - b.re, di = a.im - b.im;
        total += p.distance_metric.value_or(DistanceMetric::Manhattan) == DistanceMetric::Euclidean
                     ? std::sqrt(dr * dr + di * di)
                     : std::abs(dr) + std::abs(di);
      } else {
        total += std::abs(std::get<IntSample>(q[static_cast<std::size_t>(i)]).value -
                          std::get<IntSample>(r[static_cast<std::size_t>(j)]).value);
      }
    }
    return total;
  }

  auto gap = [&](int len) -> double {
    switch (id) {
      case 2: case 4: case 8: case 12: return *p.gap_open + len * *p.gap_extend;
      case 5: case 13: return std::max(*p.gap_open + len * *p.gap_extend, *p.gap_open2 + len * *p.gap_extend2);
      default: return len * *p.linear_gap;
    }
  };
  auto sub = [&](int a, int b) -> double {
    const auto& x = q[static_cast<std::size_t>(a)];
    const auto& y = r[static_cast<std::size_t>(b)];
    if (id == 15) return (*p.substitution_matrix)(std::get<AminoAcid>(x).code, std::get<AminoAcid>(y).code);
    if (id == 8) {
      double s = 0.0;
      const auto& u = std::get<ProfileColumn>(x).freq;
      const auto& v = std::get<ProfileColumn>(y).freq;
      for (int k = 0; k < 5; ++k)
        for (int l = 0; l < 5; ++l) s += u(k) * v(l) * (*p.substitution_matrix)(k, l);
      return s;
    }
    return std::get<Nucleotide>(x).code == std::get<Nucleotide>(y).code ? *p.match : *p.mismatch;
  };

  char run = 0;
  int len = 0;
  auto flush = [&] {
    if (len > 0) total += gap(len);
    run = 0;
    len = 0;
  };
  for (auto m : moves) {
    if (m == TracebackMove::END) break;
    if (m == TracebackMove::MMI) {
      flush();
      ++i;
      ++j;
      total += sub(i, j);
      continue;
    }
    const char kind = m == TracebackMove::INS ? 'I' : 'D';
    if (run != kind) flush();
    run = kind;
    ++len;
    if (m == TracebackMove::INS) ++j;
    else ++i;
  }
  flush();
  return total;
}

/// Cells consumed by a path: (query, reference).
inline std::pair<int, int> consumed(const std::vector<TracebackMove>& moves) {
  int dq = 0, dr = 0;
  for (auto m : moves) {
    if (m == TracebackMove::END) break;
    if (m != TracebackMove::INS) ++dq;
    if (m != TracebackMove::DEL) ++dr;
  }
  return {dq, dr};
}

inline Sequence dna(std::string_view text) { return encode_sequence(text, SymbolKind::Nucleotide); }
inline Sequence protein(std::string_view text) { return encode_sequence(text, SymbolKind::AminoAcid); }

inline ScoringParams linear_params(double match, double mismatch, double gap) {
  ScoringParams p;
  p.match = match;
  p.mismatch = mismatch;
  p.linear_gap = gap;
  return p;
}

inline ScoringParams affine_params(double match, double mismatch, double open, double extend) {
  ScoringParams p;
  p.match = match;
  p.mismatch = mismatch;
  p.gap_open = open;
  p.gap_extend = extend;
  return p;
}

inline Sequence ints(std::initializer_list<int> values) {
  Sequence s;
  for (int v : values) s.push_back(IntSample{v});
  return s;
}

inline const std::vector<int>& all_kernel_ids() {
  static const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  return ids;
}

}  // namespace testsupport
