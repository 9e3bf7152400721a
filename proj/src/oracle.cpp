#include "dphls/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dphls {

namespace {

void guard_oracle_size(SequenceView query, SequenceView reference) {
  if (query.empty() || reference.empty()) throw Error(ErrorCode::EmptySequence, "oracle needs non-empty inputs");
  if (query.size() > kOracleMaxLength || reference.size() > kOracleMaxLength)
    throw Error(ErrorCode::OracleSizeExceeded, "oracle inputs are limited to " + std::to_string(kOracleMaxLength));
}

bool within(std::optional<int> band, int row, int col) { return !band || std::abs(row - col) <= *band; }

bool region_contains(StartRegion region, int i, int j, int qlen, int rlen) {
  switch (region) {
    case StartRegion::Corner: return i == qlen - 1 && j == rlen - 1;
    case StartRegion::Anywhere: return true;
    case StartRegion::LastRow: return i == qlen - 1;
    case StartRegion::LastRowOrColumn: return i == qlen - 1 || j == rlen - 1;
  }
  return false;
}

template <class Scalar>
void oracle_traceback(const KernelSpec<Scalar>& spec, const FullMatrix<Scalar>& m, AlignmentResult<Scalar>& out) {
  std::vector<TracebackMove> rev;
  std::vector<TracebackState> rev_states;
  TracebackState state = TracebackState::MM;
  int i = out.end.row;
  int j = out.end.col;
  const int cap = m.rows + m.cols + 1;
  auto emit = [&](TracebackMove mv, TracebackState st) {
    if (static_cast<int>(rev.size()) >= cap) throw Error(ErrorCode::NonTerminating, "oracle traceback did not end");
    rev.push_back(mv);
    rev_states.push_back(st);
  };

  while (i >= 0 && j >= 0) {
    if (!m.in_band(i, j)) throw Error(ErrorCode::TracebackOutOfBounds, "oracle traceback left the band");
    const TbStep step = spec.tb_transition(state, m.pointer(i, j));
    if (step.move == TracebackMove::END) break;
    emit(step.move, state);
    if (step.move == TracebackMove::MMI) {
      --i;
      --j;
    } else if (step.move == TracebackMove::INS) {
      --j;
    } else {
      --i;
    }
    state = step.next;
  }
  const auto strategy = spec.policy.strategy;
  const TracebackState ins_state = spec.n_layers == 1 ? TracebackState::MM : TracebackState::INS;
  const TracebackState del_state = spec.n_layers == 1 ? TracebackState::MM : TracebackState::DEL;
  if (i < 0 && j >= 0 && strategy == Strategy::Global) {
    for (; j >= 0; --j) emit(TracebackMove::INS, ins_state);
  } else if (j < 0 && i >= 0 && (strategy == Strategy::Global || strategy == Strategy::SemiGlobal)) {
    for (; i >= 0; --i) emit(TracebackMove::DEL, del_state);
  }

  out.start = {i, j};
  out.moves.assign(rev.rbegin(), rev.rend());
  out.states.assign(rev_states.rbegin(), rev_states.rend());
  out.moves.push_back(TracebackMove::END);
  out.states.push_back(state);
}

}  // namespace

template <class Scalar>
OracleResult<Scalar> oracle_align(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                                  SequenceView reference, std::optional<int> band) {
  guard_oracle_size(query, reference);
  const int qlen = static_cast<int>(query.size());
  const int rlen = static_cast<int>(reference.size());
  const Objective obj = spec.policy.objective;
  const CellScores<Scalar> bad(spec.n_layers, worst<Scalar>(obj));
  const InitVectors<Scalar> init = spec.init(params, rlen, qlen);

  OracleResult<Scalar> res;
  auto& m = res.matrix;
  m.rows = qlen;
  m.cols = rlen;
  m.n_layers = spec.n_layers;
  m.cells.assign(static_cast<std::size_t>(qlen) * static_cast<std::size_t>(rlen), bad);
  m.pointers.assign(m.cells.size(), 0);
  m.computed.assign(m.cells.size(), 0);

  // value of any cell including the init row/column, honouring the band mask
  auto value = [&](int i, int j) -> const CellScores<Scalar>& {
    if (!within(band, i, j)) return bad;
    if (i < 0 && j < 0) return init.origin;
    if (i < 0) return init.row[static_cast<std::size_t>(j)];
    if (j < 0) return init.col[static_cast<std::size_t>(i)];
    return m.cells[m.index(i, j)];
  };

  for (int i = 0; i < qlen; ++i) {
    for (int j = 0; j < rlen; ++j) {
      if (!within(band, i, j)) continue;
      const PeOutput<Scalar> out = spec.pe_func(value(i - 1, j), value(i - 1, j - 1), value(i, j - 1),
                                                query[static_cast<std::size_t>(i)],
                                                reference[static_cast<std::size_t>(j)], params, Coord{i, j});
      m.cells[m.index(i, j)] = out.scores;
      m.pointers[m.index(i, j)] = out.pointer;
      m.computed[m.index(i, j)] = 1;
    }
  }

  // column-major scan with strict improvement: smallest column, then row
  bool found = false;
  auto& r = res.result;
  for (int j = 0; j < rlen; ++j) {
    for (int i = 0; i < qlen; ++i) {
      if (!m.in_band(i, j) || !region_contains(spec.start_region, i, j, qlen, rlen)) continue;
      const Scalar s = spec.score_of(m.at(i, j));
      if (!found || better(obj, s, r.score)) {
        found = true;
        r.score = s;
        r.end = {i, j};
      }
    }
  }
  if (!found) throw Error(ErrorCode::TracebackOutOfBounds, "the band excludes every cell of the start region");
  r.layers_at_end = m.at(r.end.row, r.end.col);

  if (spec.has_traceback()) {
    oracle_traceback(spec, m, r);
    if (!within(band, r.start.row, r.start.col))
      throw Error(ErrorCode::TracebackOutOfBounds, "oracle traceback ended outside the band");
  } else {
    r.start = r.end;
  }
  return res;
}

template <class Scalar>
OracleResult<Scalar> oracle_align(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                                  SequenceView reference) {
  return oracle_align(spec, params, query, reference, spec.banding);
}

// ---------------------------------------------------------------- enumeration

namespace {

enum class GapModel { Linear, Affine, TwoPiece };
enum class Region { Global, Local, Overlap, SemiGlobal };

double nucleotide_sub(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  return std::get<Nucleotide>(q).code == std::get<Nucleotide>(r).code ? *p.match : *p.mismatch;
}

double residue_sub(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  return (*p.substitution_matrix)(std::get<AminoAcid>(q).code, std::get<AminoAcid>(r).code);
}

double sum_of_pairs(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  const auto& a = std::get<ProfileColumn>(q).freq;
  const auto& b = std::get<ProfileColumn>(r).freq;
  double total = 0.0;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y) total += a(x) * b(y) * (*p.substitution_matrix)(x, y);
  return total;
}

double complex_distance(const ComplexSample& a, const ComplexSample& b, DistanceMetric metric) {
  const double dr = a.re - b.re;
  const double di = a.im - b.im;
  if (metric == DistanceMetric::Euclidean) return std::sqrt(dr * dr + di * di);
  if (metric == DistanceMetric::AbsDiff) return std::abs(dr);
  return std::abs(dr) + std::abs(di);
}

struct GapEnumerator {
  int qlen;
  int rlen;
  std::optional<int> band;
  Region region;
  std::vector<double> sub;       // qlen x rlen
  std::vector<double> run_cost;  // run_cost[k] for a k-long gap run
  double best = -std::numeric_limits<double>::infinity();

  bool ok(int a, int b) const { return !band || std::abs(a - b) <= *band; }

  bool is_end(int a, int b) const {
    switch (region) {
      case Region::Global: return a == qlen && b == rlen;
      case Region::Local: return a >= 1 && b >= 1;
      case Region::Overlap: return a >= 1 && b >= 1 && (a == qlen || b == rlen);
      case Region::SemiGlobal: return a == qlen && b >= 1;
    }
    return false;
  }

  // run: 0 none, 1 horizontal (consumes reference), 2 vertical (consumes query)
  void walk(int a, int b, double base, int run, int len) {
    const double here = base + (len > 0 ? run_cost[static_cast<std::size_t>(len)] : 0.0);
    if (is_end(a, b)) best = std::max(best, here);
    if (a < qlen && b < rlen && ok(a + 1, b + 1))
      walk(a + 1, b + 1, here + sub[static_cast<std::size_t>(a) * static_cast<std::size_t>(rlen) + static_cast<std::size_t>(b)], 0, 0);
    const bool free_top = (region == Region::Overlap || region == Region::SemiGlobal) && a == 0;
    if (b < rlen && ok(a, b + 1) && !free_top) {
      if (run == 1) walk(a, b + 1, base, 1, len + 1);
      else walk(a, b + 1, here, 1, 1);
    }
    const bool free_left = region == Region::Overlap && b == 0;
    if (a < qlen && ok(a + 1, b) && !free_left) {
      if (run == 2) walk(a + 1, b, base, 2, len + 1);
      else walk(a + 1, b, here, 2, 1);
    }
  }

  double run() {
    switch (region) {
      case Region::Global:
        if (ok(0, 0)) walk(0, 0, 0.0, 0, 0);
        break;
      case Region::Local:
        best = 0.0;  // empty alignment
        for (int a = 0; a <= qlen; ++a)
          for (int b = 0; b <= rlen; ++b)
            if (ok(a, b)) walk(a, b, 0.0, 0, 0);
        break;
      case Region::Overlap:
        for (int b = 0; b <= rlen; ++b)
          if (ok(0, b)) walk(0, b, 0.0, 0, 0);
        for (int a = 1; a <= qlen; ++a)
          if (ok(a, 0)) walk(a, 0, 0.0, 0, 0);
        break;
      case Region::SemiGlobal:
        for (int b = 0; b <= rlen; ++b)
          if (ok(0, b)) walk(0, b, 0.0, 0, 0);
        break;
    }
    return best;
  }
};

struct WarpEnumerator {
  int qlen;
  int rlen;
  std::optional<int> band;
  bool free_start;  // start anywhere in the first row
  bool free_end;    // end anywhere in the last row
  std::vector<double> cost;
  double best = std::numeric_limits<double>::infinity();

  bool ok(int i, int j) const { return !band || std::abs(i - j) <= *band; }

  void walk(int i, int j, double acc) {
    acc += cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(rlen) + static_cast<std::size_t>(j)];
    if (i == qlen - 1 && (free_end || j == rlen - 1)) best = std::min(best, acc);
    if (j + 1 < rlen && ok(i, j + 1)) walk(i, j + 1, acc);
    if (i + 1 < qlen && j + 1 < rlen && ok(i + 1, j + 1)) walk(i + 1, j + 1, acc);
    if (i + 1 < qlen && ok(i + 1, j)) walk(i + 1, j, acc);
  }

  double run() {
    if (free_start) {
      for (int j = 0; j < rlen; ++j)
        if (ok(0, j)) walk(0, j, 0.0);
    } else if (ok(0, 0)) {
      walk(0, 0, 0.0);
    }
    return best;
  }
};

struct HmmEnumerator {
  int qlen;
  int rlen;
  std::optional<int> band;
  Eigen::Matrix<double, 5, 5> emission;
  double mu;
  double lambda;
  std::vector<int> q;
  std::vector<int> r;
  double best = -std::numeric_limits<double>::infinity();

  bool ok(int a, int b) const { return !band || std::abs(a - b) <= *band; }

  // state: 0 match, 1 query-gap run (consumes query), 2 reference-gap run
  void walk(int a, int b, int state, double acc) {
    if (a == qlen && b == rlen) best = std::max(best, acc);
    if (a < qlen && b < rlen && ok(a + 1, b + 1))
      walk(a + 1, b + 1, 0, acc + emission(q[static_cast<std::size_t>(a)], r[static_cast<std::size_t>(b)]));
    if (a < qlen && ok(a + 1, b) && state != 2)
      walk(a + 1, b, 1, acc + (state == 1 ? lambda : mu) + emission(q[static_cast<std::size_t>(a)], 4));
    if (b < rlen && ok(a, b + 1) && state != 1)
      walk(a, b + 1, 2, acc + (state == 2 ? lambda : mu) + emission(4, r[static_cast<std::size_t>(b)]));
  }

  double run() {
    // the boundary forbids gaps before the first match
    if (ok(1, 1)) walk(1, 1, 0, emission(q[0], r[0]));
    return best;
  }
};

std::vector<double> gap_run_costs(GapModel model, const ScoringParams& p, int longest) {
  std::vector<double> cost(static_cast<std::size_t>(longest) + 1, 0.0);
  for (int k = 1; k <= longest; ++k) {
    double c = 0.0;
    switch (model) {
      case GapModel::Linear: c = k * *p.linear_gap; break;
      case GapModel::Affine: c = *p.gap_open + k * *p.gap_extend; break;
      case GapModel::TwoPiece:
        c = std::max(*p.gap_open + k * *p.gap_extend, *p.gap_open2 + k * *p.gap_extend2);
        break;
    }
    cost[static_cast<std::size_t>(k)] = c;
  }
  return cost;
}

}  // namespace

template <class Scalar>
double enumerate_paths(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                       SequenceView reference, std::optional<int> band) {
  const int qlen = static_cast<int>(query.size());
  const int rlen = static_cast<int>(reference.size());
  if (qlen < 1 || rlen < 1) throw Error(ErrorCode::EmptySequence, "enumeration needs non-empty inputs");
  if (qlen + rlen > kEnumerationMaxTotal)
    throw Error(ErrorCode::EnumerationSizeExceeded, "enumeration needs Q + R <= " + std::to_string(kEnumerationMaxTotal));

  const int id = spec.id;
  if (id == 9 || id == 14) {
    WarpEnumerator w{qlen, rlen, band, id == 14, id == 14, {}, std::numeric_limits<double>::infinity()};
    w.cost.resize(static_cast<std::size_t>(qlen) * static_cast<std::size_t>(rlen));
    const DistanceMetric metric = params.distance_metric.value_or(DistanceMetric::Manhattan);
    for (int i = 0; i < qlen; ++i)
      for (int j = 0; j < rlen; ++j) {
        const auto& a = query[static_cast<std::size_t>(i)];
        const auto& b = reference[static_cast<std::size_t>(j)];
        w.cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(rlen) + static_cast<std::size_t>(j)] =
            id == 9 ? complex_distance(std::get<ComplexSample>(a), std::get<ComplexSample>(b), metric)
                    : std::abs(static_cast<double>(std::get<IntSample>(a).value) - std::get<IntSample>(b).value);
      }
    return w.run();
  }

  if (id == 10) {
    HmmEnumerator h{qlen, rlen, band, *params.emission, *params.log_mu, *params.log_lambda, {}, {}, -std::numeric_limits<double>::infinity()};
    for (const auto& s : query) h.q.push_back(std::get<Nucleotide>(s).code);
    for (const auto& s : reference) h.r.push_back(std::get<Nucleotide>(s).code);
    return h.run();
  }

  GapModel model;
  Region region;
  double (*sub)(const Symbol&, const Symbol&, const ScoringParams&) = nucleotide_sub;
  switch (id) {
    case 1: case 11: model = GapModel::Linear; region = Region::Global; break;
    case 2: model = GapModel::Affine; region = Region::Global; break;
    case 3: model = GapModel::Linear; region = Region::Local; break;
    case 4: case 12: model = GapModel::Affine; region = Region::Local; break;
    case 5: case 13: model = GapModel::TwoPiece; region = Region::Global; break;
    case 6: model = GapModel::Linear; region = Region::Overlap; break;
    case 7: model = GapModel::Linear; region = Region::SemiGlobal; break;
    case 8: model = GapModel::Affine; region = Region::Global; sub = sum_of_pairs; break;
    case 15: model = GapModel::Linear; region = Region::Local; sub = residue_sub; break;
    default: throw Error(ErrorCode::UnknownKernel, "no path model for kernel id " + std::to_string(id));
  }
  GapEnumerator g{qlen, rlen, band, region, {}, gap_run_costs(model, params, qlen + rlen),
                  -std::numeric_limits<double>::infinity()};
  g.sub.resize(static_cast<std::size_t>(qlen) * static_cast<std::size_t>(rlen));
  for (int i = 0; i < qlen; ++i)
    for (int j = 0; j < rlen; ++j)
      g.sub[static_cast<std::size_t>(i) * static_cast<std::size_t>(rlen) + static_cast<std::size_t>(j)] =
          sub(query[static_cast<std::size_t>(i)], reference[static_cast<std::size_t>(j)], params);
  return g.run();
}

template <class Scalar>
double enumerate_paths(const KernelSpec<Scalar>& spec, const ScoringParams& params, SequenceView query,
                       SequenceView reference) {
  return enumerate_paths(spec, params, query, reference, spec.banding);
}

// ---------------------------------------------------------------- closed forms

ClosedForm needleman_wunsch(SequenceView query, SequenceView reference, const ScoringParams& params) {
  const auto qlen = static_cast<Eigen::Index>(query.size());
  const auto rlen = static_cast<Eigen::Index>(reference.size());
  const double gap = *params.linear_gap;
  Eigen::MatrixXd full(qlen + 1, rlen + 1);
  for (Eigen::Index i = 0; i <= qlen; ++i) full(i, 0) = static_cast<double>(i) * gap;
  for (Eigen::Index j = 0; j <= rlen; ++j) full(0, j) = static_cast<double>(j) * gap;
  for (Eigen::Index i = 1; i <= qlen; ++i)
    for (Eigen::Index j = 1; j <= rlen; ++j) {
      const double s = nucleotide_sub(query[static_cast<std::size_t>(i - 1)], reference[static_cast<std::size_t>(j - 1)], params);
      full(i, j) = std::max({full(i - 1, j - 1) + s, full(i - 1, j) + gap, full(i, j - 1) + gap});
    }
  return {full(qlen, rlen), full.bottomRightCorner(qlen, rlen)};
}

ClosedForm smith_waterman(SequenceView query, SequenceView reference, const ScoringParams& params) {
  const auto qlen = static_cast<Eigen::Index>(query.size());
  const auto rlen = static_cast<Eigen::Index>(reference.size());
  const double gap = *params.linear_gap;
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(qlen + 1, rlen + 1);
  for (Eigen::Index i = 1; i <= qlen; ++i)
    for (Eigen::Index j = 1; j <= rlen; ++j) {
      const double s = nucleotide_sub(query[static_cast<std::size_t>(i - 1)], reference[static_cast<std::size_t>(j - 1)], params);
      full(i, j) = std::max({0.0, full(i - 1, j - 1) + s, full(i - 1, j) + gap, full(i, j - 1) + gap});
    }
  return {full.maxCoeff(), full.bottomRightCorner(qlen, rlen)};
}

ClosedForm dynamic_time_warping(SequenceView query, SequenceView reference, DistanceMetric metric) {
  const auto qlen = static_cast<Eigen::Index>(query.size());
  const auto rlen = static_cast<Eigen::Index>(reference.size());
  Eigen::MatrixXd d(qlen, rlen);
  auto dist = [&](Eigen::Index i, Eigen::Index j) {
    return complex_distance(std::get<ComplexSample>(query[static_cast<std::size_t>(i)]),
                            std::get<ComplexSample>(reference[static_cast<std::size_t>(j)]), metric);
  };
  d(0, 0) = dist(0, 0);
  for (Eigen::Index j = 1; j < rlen; ++j) d(0, j) = d(0, j - 1) + dist(0, j);
  for (Eigen::Index i = 1; i < qlen; ++i) d(i, 0) = d(i - 1, 0) + dist(i, 0);
  for (Eigen::Index i = 1; i < qlen; ++i)
    for (Eigen::Index j = 1; j < rlen; ++j) d(i, j) = dist(i, j) + std::min({d(i - 1, j), d(i - 1, j - 1), d(i, j - 1)});
  return {d(qlen - 1, rlen - 1), d};
}

long long gotoh_global_score(SequenceView query, SequenceView reference, const ScoringParams& params) {
  const auto qlen = query.size();
  const auto rlen = reference.size();
  const long long match = std::llround(*params.match);
  const long long mismatch = std::llround(*params.mismatch);
  const long long open = std::llround(*params.gap_open);
  const long long extend = std::llround(*params.gap_extend);
  const long long ninf = std::numeric_limits<long long>::min() / 4;

  std::vector<std::uint8_t> r(rlen);
  for (std::size_t j = 0; j < rlen; ++j) r[j] = std::get<Nucleotide>(reference[j]).code;

  // h[j], d[j] hold row i-1 at column j (index 0 is the boundary column)
  std::vector<long long> h(rlen + 1), d(rlen + 1, ninf);
  h[0] = 0;
  for (std::size_t j = 1; j <= rlen; ++j) h[j] = open + static_cast<long long>(j) * extend;

  for (std::size_t i = 1; i <= qlen; ++i) {
    const std::uint8_t qc = std::get<Nucleotide>(query[i - 1]).code;
    long long diag = h[0];
    h[0] = open + static_cast<long long>(i) * extend;
    long long ins = ninf;
    for (std::size_t j = 1; j <= rlen; ++j) {
      ins = std::max(h[j - 1] + open, ins) + extend;
      d[j] = std::max(h[j] + open, d[j]) + extend;
      const long long mat = diag + (qc == r[j - 1] ? match : mismatch);
      diag = h[j];
      h[j] = std::max({ins, mat, d[j]});
    }
  }
  return h[rlen];
}

template OracleResult<Sat32> oracle_align(const KernelSpec<Sat32>&, const ScoringParams&, SequenceView, SequenceView);
template OracleResult<double> oracle_align(const KernelSpec<double>&, const ScoringParams&, SequenceView, SequenceView);
template OracleResult<Sat32> oracle_align(const KernelSpec<Sat32>&, const ScoringParams&, SequenceView, SequenceView,
                                          std::optional<int>);
template OracleResult<double> oracle_align(const KernelSpec<double>&, const ScoringParams&, SequenceView, SequenceView,
                                           std::optional<int>);
template double enumerate_paths(const KernelSpec<Sat32>&, const ScoringParams&, SequenceView, SequenceView);
template double enumerate_paths(const KernelSpec<double>&, const ScoringParams&, SequenceView, SequenceView);
template double enumerate_paths(const KernelSpec<Sat32>&, const ScoringParams&, SequenceView, SequenceView,
                                std::optional<int>);
template double enumerate_paths(const KernelSpec<double>&, const ScoringParams&, SequenceView, SequenceView,
                                std::optional<int>);

}  // namespace dphls
