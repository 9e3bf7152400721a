#include "dphls/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace dphls {

namespace {

template <class Scalar>
Scalar param(const std::optional<double>& v) {
  return ScoreTraits<Scalar>::from_double(*v);
}

template <class Scalar>
using SubFn = Scalar (*)(const Symbol&, const Symbol&, const ScoringParams&);

// ------------------------------------------------------------ substitution

Sat32 dna_sub(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  return std::get<Nucleotide>(q).code == std::get<Nucleotide>(r).code ? param<Sat32>(p.match)
                                                                      : param<Sat32>(p.mismatch);
}

Sat32 protein_sub(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  return ScoreTraits<Sat32>::from_double((*p.substitution_matrix)(std::get<AminoAcid>(q).code,
                                                                  std::get<AminoAcid>(r).code));
}

// Sum-of-pairs score of two frequency columns: q' M r.
double profile_sub(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  const auto& qf = std::get<ProfileColumn>(q).freq;
  const auto& rf = std::get<ProfileColumn>(r).freq;
  return qf.dot(p.substitution_matrix->topLeftCorner<5, 5>() * rf);
}

// ------------------------------------------------------------ init

enum class Edge { Zero, Linear, Affine, TwoPiece, Worst };

template <class Scalar>
Scalar edge_value(Edge edge, int k, const ScoringParams& p, Objective obj) {
  using T = ScoreTraits<Scalar>;
  const Scalar len = T::from_double(k);
  switch (edge) {
    case Edge::Zero: return T::zero();
    case Edge::Linear: return len * param<Scalar>(p.linear_gap);
    case Edge::Affine: return param<Scalar>(p.gap_open) + len * param<Scalar>(p.gap_extend);
    case Edge::TwoPiece:
      return std::max(param<Scalar>(p.gap_open) + len * param<Scalar>(p.gap_extend),
                      param<Scalar>(p.gap_open2) + len * param<Scalar>(p.gap_extend2));
    case Edge::Worst: return worst<Scalar>(obj);
  }
  return T::zero();
}

/// Boundary vectors: layer 0 follows the edge rule, all gap layers start at
/// the worst value (a gap layer cannot be open on the boundary itself).
template <class Scalar>
typename KernelSpec<Scalar>::InitFn make_init(int n_layers, Edge row_edge, Edge col_edge, Objective obj) {
  return [=](const ScoringParams& p, int max_ref, int max_qry) {
    const Scalar bad = worst<Scalar>(obj);
    InitVectors<Scalar> iv;
    iv.origin = CellScores<Scalar>(n_layers, bad);
    iv.origin[0] = ScoreTraits<Scalar>::zero();
    iv.row.assign(static_cast<std::size_t>(max_ref), CellScores<Scalar>(n_layers, bad));
    iv.col.assign(static_cast<std::size_t>(max_qry), CellScores<Scalar>(n_layers, bad));
    for (int j = 0; j < max_ref; ++j) iv.row[static_cast<std::size_t>(j)][0] = edge_value<Scalar>(row_edge, j + 1, p, obj);
    for (int i = 0; i < max_qry; ++i) iv.col[static_cast<std::size_t>(i)][0] = edge_value<Scalar>(col_edge, i + 1, p, obj);
    return iv;
  };
}

// ------------------------------------------------------------ PE functions
//
// Candidates are evaluated left (insert), diagonal (match), up (delete), then
// the zero floor for local kernels; a later candidate replaces the running
// best only when strictly better, so ties go to the earliest one.

template <class Scalar>
typename KernelSpec<Scalar>::PeFn linear_pe(SubFn<Scalar> sub, bool clamp_zero) {
  return [=](const CellScores<Scalar>& up, const CellScores<Scalar>& diag, const CellScores<Scalar>& left,
             const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    const Scalar gap = param<Scalar>(p.linear_gap);
    const Scalar ins = left[0] + gap;
    const Scalar mat = diag[0] + sub(q, r, p);
    const Scalar del = up[0] + gap;

    PeOutput<Scalar> out{CellScores<Scalar>(1), tbp::kLeft};
    Scalar best = ins;
    if (best < mat) {
      best = mat;
      out.pointer = tbp::kDiag;
    }
    if (best < del) {
      best = del;
      out.pointer = tbp::kUp;
    }
    if (clamp_zero && best < ScoreTraits<Scalar>::zero()) {
      best = ScoreTraits<Scalar>::zero();
      out.pointer = tbp::kEnd;
    }
    out.scores[0] = best;
    return out;
  };
}

template <class Scalar>
typename KernelSpec<Scalar>::PeFn affine_pe(SubFn<Scalar> sub, bool clamp_zero) {
  using namespace layer;
  return [=](const CellScores<Scalar>& up, const CellScores<Scalar>& diag, const CellScores<Scalar>& left,
             const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    const Scalar open = param<Scalar>(p.gap_open);
    const Scalar extend = param<Scalar>(p.gap_extend);
    PeOutput<Scalar> out{CellScores<Scalar>(3), 0};

    Scalar ins = left[H] + open;
    if (ins < left[I]) {
      ins = left[I];
      out.pointer |= tbp::kInsExtend;
    }
    ins = ins + extend;

    Scalar del = up[H] + open;
    if (del < up[D]) {
      del = up[D];
      out.pointer |= tbp::kDelExtend;
    }
    del = del + extend;

    const Scalar mat = diag[H] + sub(q, r, p);
    Scalar best = ins;
    TracebackPointer src = tbp::kLeft;
    if (best < mat) {
      best = mat;
      src = tbp::kDiag;
    }
    if (best < del) {
      best = del;
      src = tbp::kUp;
    }
    if (clamp_zero && best < ScoreTraits<Scalar>::zero()) {
      best = ScoreTraits<Scalar>::zero();
      src = tbp::kEnd;
    }
    out.pointer |= src;
    out.scores[H] = best;
    out.scores[I] = ins;
    out.scores[D] = del;
    return out;
  };
}

KernelSpec<Sat32>::PeFn two_piece_pe() {
  using namespace layer;
  return [](const CellScores<Sat32>& up, const CellScores<Sat32>& diag, const CellScores<Sat32>& left,
            const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    PeOutput<Sat32> out{CellScores<Sat32>(5), 0};
    auto gap = [&](const CellScores<Sat32>& from, int lay, const std::optional<double>& o,
                   const std::optional<double>& e, TracebackPointer ext_bit) {
      Sat32 v = from[H] + param<Sat32>(o);
      if (v < from[lay]) {
        v = from[lay];
        out.pointer |= ext_bit;
      }
      return v + param<Sat32>(e);
    };
    const Sat32 ins1 = gap(left, I, p.gap_open, p.gap_extend, tbp::kIns1Extend);
    const Sat32 del1 = gap(up, D, p.gap_open, p.gap_extend, tbp::kDel1Extend);
    const Sat32 ins2 = gap(left, I2, p.gap_open2, p.gap_extend2, tbp::kIns2Extend);
    const Sat32 del2 = gap(up, D2, p.gap_open2, p.gap_extend2, tbp::kDel2Extend);
    const Sat32 mat = diag[H] + dna_sub(q, r, p);

    Sat32 best = ins1;
    TracebackPointer src = tbp::kSrcIns1;
    auto consider = [&](Sat32 v, TracebackPointer code) {
      if (best < v) {
        best = v;
        src = code;
      }
    };
    consider(mat, tbp::kDiag);
    consider(del1, tbp::kSrcDel1);
    consider(ins2, tbp::kSrcIns2);
    consider(del2, tbp::kSrcDel2);

    out.pointer |= src;
    out.scores[H] = best;
    out.scores[I] = ins1;
    out.scores[D] = del1;
    out.scores[I2] = ins2;
    out.scores[D2] = del2;
    return out;
  };
}

// Warping recurrence: cost(q, r) + min(left, diag, up).
template <class Scalar>
typename KernelSpec<Scalar>::PeFn warping_pe(Scalar (*cost)(const Symbol&, const Symbol&, const ScoringParams&)) {
  return [=](const CellScores<Scalar>& up, const CellScores<Scalar>& diag, const CellScores<Scalar>& left,
             const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    PeOutput<Scalar> out{CellScores<Scalar>(1), tbp::kLeft};
    Scalar best = left[0];
    if (diag[0] < best) {
      best = diag[0];
      out.pointer = tbp::kDiag;
    }
    if (up[0] < best) {
      best = up[0];
      out.pointer = tbp::kUp;
    }
    out.scores[0] = cost(q, r, p) + best;
    return out;
  };
}

double complex_cost(const Symbol& q, const Symbol& r, const ScoringParams& p) {
  return sample_distance(std::get<ComplexSample>(q), std::get<ComplexSample>(r),
                         p.distance_metric.value_or(DistanceMetric::Manhattan));
}

Sat32 int_cost(const Symbol& q, const Symbol& r, const ScoringParams&) {
  const std::int64_t d = std::int64_t{std::get<IntSample>(q).value} - std::get<IntSample>(r).value;
  return Sat32(static_cast<Sat32::value_type>(std::min<std::int64_t>(std::llabs(d), Sat32::kMax)));
}

// ------------------------------------------------------------ traceback FSMs

TbStep linear_tb(TracebackState, TracebackPointer ptr) {
  switch (ptr) {
    case tbp::kDiag: return {TracebackState::MM, TracebackMove::MMI};
    case tbp::kUp: return {TracebackState::MM, TracebackMove::DEL};
    case tbp::kLeft: return {TracebackState::MM, TracebackMove::INS};
    default: return {TracebackState::MM, TracebackMove::END};
  }
}

TbStep affine_tb(TracebackState state, TracebackPointer ptr) {
  using St = TracebackState;
  const St after_ins = (ptr & tbp::kInsExtend) ? St::INS : St::MM;
  const St after_del = (ptr & tbp::kDelExtend) ? St::DEL : St::MM;
  switch (state) {
    case St::MM:
      switch (ptr & 0x3) {
        case tbp::kDiag: return {St::MM, TracebackMove::MMI};
        case tbp::kLeft: return {after_ins, TracebackMove::INS};
        case tbp::kUp: return {after_del, TracebackMove::DEL};
        default: return {St::MM, TracebackMove::END};
      }
    case St::INS: return {after_ins, TracebackMove::INS};
    case St::DEL: return {after_del, TracebackMove::DEL};
    default: return {St::MM, TracebackMove::END};
  }
}

TbStep two_piece_tb(TracebackState state, TracebackPointer ptr) {
  using St = TracebackState;
  const St after_ins1 = (ptr & tbp::kIns1Extend) ? St::INS : St::MM;
  const St after_del1 = (ptr & tbp::kDel1Extend) ? St::DEL : St::MM;
  const St after_ins2 = (ptr & tbp::kIns2Extend) ? St::LONG_INS : St::MM;
  const St after_del2 = (ptr & tbp::kDel2Extend) ? St::LONG_DEL : St::MM;
  switch (state) {
    case St::MM:
      switch (ptr & 0x7) {
        case tbp::kDiag: return {St::MM, TracebackMove::MMI};
        case tbp::kSrcIns1: return {after_ins1, TracebackMove::INS};
        case tbp::kSrcDel1: return {after_del1, TracebackMove::DEL};
        case tbp::kSrcIns2: return {after_ins2, TracebackMove::INS};
        case tbp::kSrcDel2: return {after_del2, TracebackMove::DEL};
        default: return {St::MM, TracebackMove::END};
      }
    case St::INS: return {after_ins1, TracebackMove::INS};
    case St::DEL: return {after_del1, TracebackMove::DEL};
    case St::LONG_INS: return {after_ins2, TracebackMove::INS};
    case St::LONG_DEL: return {after_del2, TracebackMove::DEL};
  }
  return {St::MM, TracebackMove::END};
}

// ------------------------------------------------------------ assembly

template <class Scalar>
KernelSpec<Scalar> base(int id, std::string name, SymbolKind kind, int n_layers, Strategy strategy,
                        Objective obj = Objective::Maximize) {
  KernelSpec<Scalar> k;
  k.id = id;
  k.name = std::move(name);
  k.symbol_kind = kind;
  k.n_layers = n_layers;
  k.pointer_width = min_pointer_width(n_layers);
  k.state_set = canonical_states(n_layers);
  k.policy = {strategy, obj};
  k.start_region = start_region_for(strategy);
  return k;
}

using P = ParamName;

KernelSpec<Sat32> linear_kernel(int id, std::string name, Strategy strategy, Edge row, Edge col, bool clamp) {
  auto k = base<Sat32>(id, std::move(name), SymbolKind::Nucleotide, 1, strategy);
  k.required_params = {P::Match, P::Mismatch, P::LinearGap};
  k.init = make_init<Sat32>(1, row, col, Objective::Maximize);
  k.pe_func = linear_pe<Sat32>(dna_sub, clamp);
  k.tb_transition = linear_tb;
  return k;
}

KernelSpec<Sat32> affine_kernel(int id, std::string name, Strategy strategy, bool local) {
  auto k = base<Sat32>(id, std::move(name), SymbolKind::Nucleotide, 3, strategy);
  k.required_params = {P::Match, P::Mismatch, P::GapOpen, P::GapExtend};
  const Edge edge = local ? Edge::Zero : Edge::Affine;
  k.init = make_init<Sat32>(3, edge, edge, Objective::Maximize);
  k.pe_func = affine_pe<Sat32>(dna_sub, local);
  k.tb_transition = affine_tb;
  return k;
}

}  // namespace

double sample_distance(const ComplexSample& a, const ComplexSample& b, DistanceMetric m) {
  const double dr = a.re - b.re;
  const double di = a.im - b.im;
  switch (m) {
    case DistanceMetric::Euclidean: return std::sqrt(dr * dr + di * di);
    case DistanceMetric::AbsDiff: return std::abs(dr);
    case DistanceMetric::Manhattan:
    default: return std::abs(dr) + std::abs(di);
  }
}

KernelSpec<Sat32> kernel_global_linear() {
  return linear_kernel(1, "global_linear", Strategy::Global, Edge::Linear, Edge::Linear, false);
}

KernelSpec<Sat32> kernel_global_affine() { return affine_kernel(2, "global_affine", Strategy::Global, false); }

KernelSpec<Sat32> kernel_local_linear() {
  return linear_kernel(3, "local_linear", Strategy::Local, Edge::Zero, Edge::Zero, true);
}

KernelSpec<Sat32> kernel_local_affine() { return affine_kernel(4, "local_affine", Strategy::Local, true); }

KernelSpec<Sat32> kernel_global_two_piece() {
  auto k = base<Sat32>(5, "global_two_piece", SymbolKind::Nucleotide, 5, Strategy::Global);
  k.required_params = {P::Match, P::Mismatch, P::GapOpen, P::GapExtend, P::GapOpen2, P::GapExtend2};
  k.init = make_init<Sat32>(5, Edge::TwoPiece, Edge::TwoPiece, Objective::Maximize);
  k.pe_func = two_piece_pe();
  k.tb_transition = two_piece_tb;
  return k;
}

KernelSpec<Sat32> kernel_overlap() {
  return linear_kernel(6, "overlap", Strategy::Overlap, Edge::Zero, Edge::Zero, false);
}

KernelSpec<Sat32> kernel_semiglobal() {
  return linear_kernel(7, "semiglobal", Strategy::SemiGlobal, Edge::Zero, Edge::Linear, false);
}

KernelSpec<double> kernel_profile() {
  auto k = base<double>(8, "profile", SymbolKind::ProfileColumn, 3, Strategy::Global);
  k.required_params = {P::SubstitutionMatrix, P::GapOpen, P::GapExtend};
  k.substitution_size = 5;
  k.init = make_init<double>(3, Edge::Affine, Edge::Affine, Objective::Maximize);
  k.pe_func = affine_pe<double>(profile_sub, false);
  k.tb_transition = affine_tb;
  return k;
}

KernelSpec<double> kernel_dtw() {
  auto k = base<double>(9, "dtw", SymbolKind::ComplexSample, 1, Strategy::Global, Objective::Minimize);
  // distance_metric is optional here and defaults to Manhattan.
  k.init = make_init<double>(1, Edge::Worst, Edge::Worst, Objective::Minimize);
  k.pe_func = warping_pe<double>(complex_cost);
  k.tb_transition = linear_tb;
  return k;
}

KernelSpec<double> kernel_viterbi() {
  using namespace layer;
  auto k = base<double>(10, "viterbi", SymbolKind::Nucleotide, 3, Strategy::None);
  k.required_params = {P::LogMu, P::LogLambda, P::Emission};
  k.pointer_width = 0;
  k.start_region = StartRegion::Corner;
  k.init = make_init<double>(3, Edge::Worst, Edge::Worst, Objective::Maximize);
  k.pe_func = [](const CellScores<double>& up, const CellScores<double>& diag, const CellScores<double>& left,
                 const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    const auto& e = *p.emission;
    const int qc = std::get<Nucleotide>(q).code;
    const int rc = std::get<Nucleotide>(r).code;
    const double mu = *p.log_mu;
    const double lambda = *p.log_lambda;
    PeOutput<double> out{CellScores<double>(3), 0};
    out.scores[M] = e(qc, rc) + std::max({diag[M], diag[X], diag[Y]});
    out.scores[X] = std::max(up[M] + mu, up[X] + lambda) + e(qc, 4);
    out.scores[Y] = std::max(left[M] + mu, left[Y] + lambda) + e(4, rc);
    return out;
  };
  k.tb_transition = [](TracebackState, TracebackPointer) { return TbStep{TracebackState::MM, TracebackMove::END}; };
  k.cell_score = [](const CellScores<double>& c) { return std::max({c[M], c[X], c[Y]}); };
  return k;
}

KernelSpec<Sat32> kernel_banded_global_linear(int band) {
  auto k = kernel_global_linear();
  k.id = 11;
  k.name = "banded_global_linear";
  k.banding = band;
  return k;
}

KernelSpec<Sat32> kernel_banded_local_affine(int band) {
  auto k = kernel_local_affine();
  k.id = 12;
  k.name = "banded_local_affine";
  k.policy.strategy = Strategy::None;
  k.start_region = StartRegion::Anywhere;
  k.banding = band;
  return k;
}

KernelSpec<Sat32> kernel_banded_global_two_piece(int band) {
  auto k = kernel_global_two_piece();
  k.id = 13;
  k.name = "banded_global_two_piece";
  k.banding = band;
  return k;
}

KernelSpec<Sat32> kernel_sdtw(bool with_traceback) {
  auto k = base<Sat32>(14, "sdtw", SymbolKind::IntSample, 1, Strategy::SemiGlobal, Objective::Minimize);
  k.init = make_init<Sat32>(1, Edge::Zero, Edge::Worst, Objective::Minimize);
  k.pe_func = warping_pe<Sat32>(int_cost);
  k.tb_transition = linear_tb;
  if (!with_traceback) {
    k.policy.strategy = Strategy::None;
    k.start_region = StartRegion::LastRow;
  }
  return k;
}

KernelSpec<Sat32> kernel_protein_local() {
  auto k = base<Sat32>(15, "protein_local", SymbolKind::AminoAcid, 1, Strategy::Local);
  k.required_params = {P::SubstitutionMatrix, P::LinearGap};
  k.substitution_size = 20;
  k.init = make_init<Sat32>(1, Edge::Zero, Edge::Zero, Objective::Maximize);
  k.pe_func = linear_pe<Sat32>(protein_sub, true);
  k.tb_transition = linear_tb;
  return k;
}

const KernelCatalog& kernel_catalog() {
  static const KernelCatalog catalog = [] {
    KernelCatalog c;
    c.emplace(1, kernel_global_linear());
    c.emplace(2, kernel_global_affine());
    c.emplace(3, kernel_local_linear());
    c.emplace(4, kernel_local_affine());
    c.emplace(5, kernel_global_two_piece());
    c.emplace(6, kernel_overlap());
    c.emplace(7, kernel_semiglobal());
    c.emplace(8, kernel_profile());
    c.emplace(9, kernel_dtw());
    c.emplace(10, kernel_viterbi());
    c.emplace(11, kernel_banded_global_linear());
    c.emplace(12, kernel_banded_local_affine());
    c.emplace(13, kernel_banded_global_two_piece());
    c.emplace(14, kernel_sdtw());
    c.emplace(15, kernel_protein_local());
    return c;
  }();
  return catalog;
}

const AnyKernel& find_kernel(std::string_view id_or_name) {
  const auto& catalog = kernel_catalog();
  int id = 0;
  const auto* end = id_or_name.data() + id_or_name.size();
  if (auto [ptr, ec] = std::from_chars(id_or_name.data(), end, id); ec == std::errc{} && ptr == end) {
    if (auto it = catalog.find(id); it != catalog.end()) return it->second;
  }
  for (const auto& [_, k] : catalog)
    if (kernel_name(k) == id_or_name) return k;
  throw Error(ErrorCode::UnknownKernel, std::string(id_or_name));
}

}  // namespace dphls
