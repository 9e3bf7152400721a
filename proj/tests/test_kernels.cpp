#include <doctest.h>

#include "dphls/oracle.hpp"
#include "support/support.hpp"

using namespace dphls;
using testsupport::dna;

namespace {

const EngineConfig kConfig{};

int sat(Sat32 s) { return s.value(); }

std::string cigar(const std::vector<TracebackMove>& moves) { return to_cigar(moves); }

// Plain local-linear DP over an arbitrary substitution table.
double local_with_matrix(const Sequence& q, const Sequence& r, const Eigen::MatrixXd& m, double gap) {
  std::vector<std::vector<double>> h(q.size() + 1, std::vector<double>(r.size() + 1, 0.0));
  double best = 0.0;
  for (std::size_t i = 1; i <= q.size(); ++i)
    for (std::size_t j = 1; j <= r.size(); ++j) {
      const double s = m(std::get<AminoAcid>(q[i - 1]).code, std::get<AminoAcid>(r[j - 1]).code);
      h[i][j] = std::max({0.0, h[i - 1][j - 1] + s, h[i - 1][j] + gap, h[i][j - 1] + gap});
      best = std::max(best, h[i][j]);
    }
  return best;
}

ScoringParams two_piece(double open1, double ext1, double open2, double ext2) {
  auto p = testsupport::affine_params(1, -100, open1, ext1);
  p.gap_open2 = open2;
  p.gap_extend2 = ext2;
  return p;
}

ProfileColumn one_hot(int k) {
  ProfileColumn c;
  c.freq(k) = 1.0;
  return c;
}

}  // namespace

TEST_CASE("catalog holds fifteen kernels keyed by id") {
  const auto& cat = kernel_catalog();
  CHECK(cat.size() == 15);
  for (const auto& [id, k] : cat) CHECK(kernel_id(k) == id);
  CHECK(kernel_id(find_kernel("3")) == 3);
  CHECK(kernel_id(find_kernel(kernel_name(cat.at(7)))) == 7);
  CHECK_THROWS_AS(find_kernel("99"), Error);
}

TEST_CASE("#1 global linear") {
  const auto p = testsupport::linear_params(1, -1, -1);
  const auto k = kernel_global_linear();
  SUBCASE("identical") {
    const auto r = align(k, kConfig, p, dna("ACGT"), dna("ACGT"));
    CHECK(sat(r.score) == 4);
    CHECK(cigar(r.moves) == "4M");
    CHECK(r.moves.back() == TracebackMove::END);
  }
  SUBCASE("one match and two forced gaps") {
    CHECK(sat(align(k, kConfig, p, dna("A"), dna("AAA")).score) == -1);
  }
  SUBCASE("closed form") {
    const auto q = dna("GATTACA"), ref = dna("GCATGCT");
    CHECK(sat(align(k, kConfig, p, q, ref).score) == needleman_wunsch(q, ref, p).score);
  }
}

TEST_CASE("#2 global affine") {
  const auto k = kernel_global_affine();
  SUBCASE("identical") {
    const auto p = testsupport::affine_params(3, -2, -4, -1);
    const auto q = dna("ACGTTGCA");
    const auto r = align(k, kConfig, p, q, q);
    CHECK(sat(r.score) == 24);
    CHECK(cigar(r.moves) == "8M");
  }
  SUBCASE("AAAA vs AA") {
    const auto p = testsupport::affine_params(1, -1, -2, -1);
    const auto q = dna("AAAA"), ref = dna("AA");
    const auto r = align(k, kConfig, p, q, ref);
    CHECK(sat(r.score) == enumerate_paths(k, p, q, ref));
  }
  SUBCASE("one long gap instead of two short ones") {
    const auto p = testsupport::affine_params(1, -1, -5, -1);
    const auto q = dna("AAAACCCCGGGG"), ref = dna("AAAAGGGG");
    const auto r = align(k, kConfig, p, q, ref);
    CHECK(sat(r.score) == gotoh_global_score(q, ref, p));
    CHECK(cigar(r.moves) == "4M4D4M");
  }
}

TEST_CASE("#3 local linear") {
  const auto k = kernel_local_linear();
  SUBCASE("disjoint alphabets") {
    const auto r = align(k, kConfig, testsupport::linear_params(1, -1, -1), dna("AAAA"), dna("CCCC"));
    CHECK(sat(r.score) == 0);
    CHECK(r.moves == std::vector<TracebackMove>{TracebackMove::END});
  }
  SUBCASE("closed form") {
    const auto p = testsupport::linear_params(3, -3, -2);
    const auto q = dna("TGTTACGG"), ref = dna("GGTTGACTA");
    const auto r = align(k, kConfig, p, q, ref);
    CHECK(sat(r.score) == smith_waterman(q, ref, p).score);
    CHECK(testsupport::rescore(3, p, q, ref, r.start, r.moves) == sat(r.score));
  }
  SUBCASE("embedded query") {
    const auto p = testsupport::linear_params(2, -1, -1);
    const auto r = align(k, kConfig, p, dna("GATT"), dna("CCGATTCC"));
    CHECK(sat(r.score) == 8);
    CHECK(r.start == Coord{-1, 1});
    CHECK(r.end == Coord{3, 5});
  }
}

TEST_CASE("#4 local affine") {
  const auto k = kernel_local_affine();
  CHECK(sat(align(k, kConfig, testsupport::affine_params(1, -1, -2, -1), dna("AAAA"), dna("CCCC")).score) == 0);
  testsupport::Rng rng(4);
  for (int n = 0; n < 2; ++n) {
    const auto p = testsupport::random_params(rng, 4);
    const auto q = testsupport::random_sequence(rng, SymbolKind::Nucleotide, 7);
    const auto ref = testsupport::random_sequence(rng, SymbolKind::Nucleotide, 8);
    CHECK(sat(align(k, kConfig, p, q, ref).score) == enumerate_paths(k, p, q, ref));
  }
}

TEST_CASE("#5 two-piece gap cost is the better of two lines") {
  const auto k = kernel_global_two_piece();
  const auto p = two_piece(-2, -3, -10, -1);
  for (int len = 1; len <= 12; ++len) {
    const auto q = dna("A" + std::string(static_cast<std::size_t>(len), 'C') + "A");
    const auto ref = dna("AA");
    const double expected = 2.0 + std::max(-2.0 - 3.0 * len, -10.0 - len);
    const auto r = align(k, kConfig, p, q, ref);
    CHECK(sat(r.score) == expected);
    CHECK(enumerate_paths(k, p, q, ref) == expected);
    const bool long_run = std::find(r.states.begin(), r.states.end(), TracebackState::LONG_DEL) != r.states.end();
    // crossover of the two lines is at 4
    CHECK(long_run == (len > 4));
  }
  const auto q = dna("ACGTACGT");
  CHECK(sat(align(k, kConfig, two_piece(-2, -3, -10, -1), q, q).score) == 8);
}

TEST_CASE("#6 overlap") {
  const auto k = kernel_overlap();
  const auto p = testsupport::linear_params(1, -1, -1);
  SUBCASE("suffix of query is prefix of reference") {
    const auto r = align(k, kConfig, p, dna("TTTTACGT"), dna("ACGTGGGG"));
    CHECK(sat(r.score) == 4);
    CHECK(r.end == Coord{7, 3});
    CHECK(r.start == Coord{3, -1});
  }
  SUBCASE("disjoint") {
    const auto q = dna("AAAA"), ref = dna("CCCC");
    const auto r = align(k, kConfig, p, q, ref);
    // the overlap must cover at least one cell: a single mismatch
    CHECK(sat(r.score) == -1);
    CHECK(sat(r.score) == enumerate_paths(k, p, q, ref));
  }
  SUBCASE("containment behaves as a semi-global hit") {
    const auto q = dna("ACG"), ref = dna("TTACGTT");
    CHECK(sat(align(k, kConfig, p, q, ref).score) == 3);
    CHECK(sat(align(kernel_semiglobal(), kConfig, p, q, ref).score) == 3);
  }
}

TEST_CASE("#7 semi-global") {
  const auto k = kernel_semiglobal();
  const auto p = testsupport::linear_params(2, -1, -1);
  CHECK(sat(align(k, kConfig, p, dna("ACGT"), dna("GGACGTGG")).score) == 8);
  const auto q = dna("ACGTTACGGA"), ref = dna("ACTTAG");
  CHECK(sat(align(k, kConfig, p, q, ref).score) == enumerate_paths(k, p, q, ref));
  const auto same = dna("GATTACAGG");
  CHECK(sat(align(k, kConfig, p, same, same).score) == needleman_wunsch(same, same, p).score);
}

TEST_CASE("#8 profile alignment") {
  const auto k = kernel_profile();
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(5, 5, -1.0);
  m.diagonal().setConstant(2.0);
  ScoringParams p;
  p.substitution_matrix = m;
  p.gap_open = -3;
  p.gap_extend = -1;
  SUBCASE("one-hot columns reduce to #2") {
    const auto q = dna("GATTACA"), ref = dna("GCATGCT");
    Sequence qp, rp;
    for (const auto& s : q) qp.push_back(one_hot(std::get<Nucleotide>(s).code));
    for (const auto& s : ref) rp.push_back(one_hot(std::get<Nucleotide>(s).code));
    const auto dnap = testsupport::affine_params(2, -1, -3, -1);
    CHECK(align(k, kConfig, p, qp, rp).score == sat(align(kernel_global_affine(), kConfig, dnap, q, ref).score));
  }
  SUBCASE("uniform column scores the mean of M") {
    ProfileColumn uniform;
    uniform.freq.setConstant(0.2);
    const auto r = align(k, kConfig, p, Sequence{uniform}, Sequence{one_hot(1)});
    CHECK(r.score == doctest::Approx(m.col(1).mean()));
  }
  SUBCASE("gap-only column") {
    ProfileColumn col;
    col.freq << 0.1, 0.2, 0.3, 0.4, 0.0;
    double expected = 0.0;
    for (int b = 0; b < 5; ++b) expected += col.freq(b) * m(4, b);
    CHECK(align(k, kConfig, p, Sequence{one_hot(4)}, Sequence{col}).score == doctest::Approx(expected));
  }
}

TEST_CASE("#9 dynamic time warping") {
  const auto k = kernel_dtw();
  ScoringParams p;
  p.distance_metric = DistanceMetric::Manhattan;
  SUBCASE("identical signals") {
    Sequence s{ComplexSample{1, 2}, ComplexSample{-1, 0}, ComplexSample{3, 3}};
    const auto r = align(k, kConfig, p, s, s);
    CHECK(r.score == 0.0);
    CHECK(cigar(r.moves) == "3M");
  }
  SUBCASE("constant offset") {
    Sequence a(6, ComplexSample{0, 0}), b(6, ComplexSample{1.5, 0});
    CHECK(align(k, kConfig, p, a, b).score == doctest::Approx(9.0));
  }
  SUBCASE("brute force and closed form") {
    testsupport::Rng rng(9);
    for (int n = 0; n < 5; ++n) {
      const auto q = testsupport::random_sequence(rng, SymbolKind::ComplexSample, rng.uniform(1, 8));
      const auto ref = testsupport::random_sequence(rng, SymbolKind::ComplexSample, rng.uniform(1, 8));
      const double got = align(k, kConfig, p, q, ref).score;
      CHECK(testsupport::close(got, enumerate_paths(k, p, q, ref)));
      CHECK(testsupport::close(got, dynamic_time_warping(q, ref, DistanceMetric::Manhattan).score));
    }
  }
}

TEST_CASE("#10 Viterbi") {
  const auto k = kernel_viterbi();
  ScoringParams p;
  p.emission = Eigen::Matrix<double, 5, 5>::Zero();
  p.log_mu = 0.0;
  p.log_lambda = 0.0;
  CHECK(align(k, kConfig, p, dna("ACGT"), dna("AGT")).score == 0.0);

  testsupport::Rng rng(10);
  p = testsupport::random_params(rng, 10);
  const auto single = align(k, kConfig, p, dna("G"), dna("T"));
  CHECK(single.score == (*p.emission)(2, 3));
  CHECK(single.moves.empty());
  for (int n = 0; n < 3; ++n) {
    const auto q = testsupport::random_sequence(rng, SymbolKind::Nucleotide, 6);
    const auto ref = testsupport::random_sequence(rng, SymbolKind::Nucleotide, 6);
    CHECK(testsupport::close(align(k, kConfig, p, q, ref).score, enumerate_paths(k, p, q, ref)));
  }
}

TEST_CASE("#11 banded global linear") {
  const auto p = testsupport::linear_params(1, -1, -1);
  const auto q = dna("GATTACAGATT"), ref = dna("GCATGCTTAG");
  SUBCASE("wide band equals #1") {
    const auto banded = align(kernel_banded_global_linear(11), kConfig, p, q, ref);
    const auto plain = align(kernel_global_linear(), kConfig, p, q, ref);
    CHECK(banded.score == plain.score);
    CHECK(banded.moves == plain.moves);
  }
  SUBCASE("identical sequences inside a narrow band") {
    CHECK(sat(align(kernel_banded_global_linear(1), kConfig, p, q, q).score) == 11);
  }
  SUBCASE("narrow band never beats the full matrix") {
    const auto a = dna("AAAACCCC"), b = dna("CCCCAAAA");
    const auto narrow = align(kernel_banded_global_linear(1), kConfig, p, a, b);
    CHECK(sat(narrow.score) <= needleman_wunsch(a, b, p).score);
    CHECK(sat(narrow.score) == enumerate_paths(kernel_banded_global_linear(1), p, a, b));
  }
}

TEST_CASE("#12 banded local affine") {
  const auto p = testsupport::affine_params(2, -1, -2, -1);
  const auto q = dna("TTGATTACAG"), ref = dna("CGATTCCAG");
  const auto wide = align(kernel_banded_local_affine(10), kConfig, p, q, ref);
  CHECK(wide.score == align(kernel_local_affine(), kConfig, p, q, ref).score);
  CHECK(wide.moves.empty());
  CHECK(sat(align(kernel_banded_local_affine(1), kConfig, p, q, q).score) == 20);
  const auto narrow = align(kernel_banded_local_affine(1), kConfig, p, dna("AAAACCCC"), dna("CCCCAAAA"));
  CHECK(sat(narrow.score) <= sat(align(kernel_local_affine(), kConfig, p, dna("AAAACCCC"), dna("CCCCAAAA")).score));
  CHECK(sat(narrow.score) == enumerate_paths(kernel_banded_local_affine(1), p, dna("AAAACCCC"), dna("CCCCAAAA")));
}

TEST_CASE("#13 banded two-piece") {
  const auto p = two_piece(-2, -3, -10, -1);
  const auto q = dna("ACGTACGTAA"), ref = dna("ACGTAA");
  const auto wide = align(kernel_banded_global_two_piece(10), kConfig, p, q, ref);
  const auto plain = align(kernel_global_two_piece(), kConfig, p, q, ref);
  CHECK(wide.score == plain.score);
  CHECK(wide.moves == plain.moves);
  CHECK(sat(align(kernel_banded_global_two_piece(1), kConfig, p, q, q).score) == 10);
  const auto a = dna("AACCAA"), b = dna("AAAA");
  CHECK(sat(align(kernel_banded_global_two_piece(2), kConfig, p, a, b).score) ==
        enumerate_paths(kernel_banded_global_two_piece(2), p, a, b));
}

TEST_CASE("#14 subsequence DTW") {
  const auto k = kernel_sdtw();
  const ScoringParams p;
  CHECK(sat(align(k, kConfig, p, testsupport::ints({3, 4, 5}), testsupport::ints({9, 1, 3, 4, 5, 7})).score) == 0);
  CHECK(sat(align(k, kConfig, p, testsupport::ints({6}), testsupport::ints({1, 9, 4, 12})).score) == 2);
  testsupport::Rng rng(14);
  for (int n = 0; n < 5; ++n) {
    const auto q = testsupport::random_sequence(rng, SymbolKind::IntSample, rng.uniform(1, 8));
    const auto ref = testsupport::random_sequence(rng, SymbolKind::IntSample, rng.uniform(1, 8));
    CHECK(sat(align(k, kConfig, p, q, ref).score) == enumerate_paths(k, p, q, ref));
  }
  SUBCASE("optional traceback") {
    const auto q = testsupport::ints({2, 8, 3}), ref = testsupport::ints({1, 2, 7, 3, 3, 0});
    const auto r = align(kernel_sdtw(true), kConfig, p, q, ref);
    CHECK(r.score == align(k, kConfig, p, q, ref).score);
    CHECK(testsupport::rescore(14, p, q, ref, r.start, r.moves) == sat(r.score));
  }
}

TEST_CASE("#15 protein local") {
  const auto k = kernel_protein_local();
  SUBCASE("identical peptide scores the matrix diagonal") {
    ScoringParams p;
    p.substitution_matrix = testsupport::blosum62();
    p.linear_gap = -4;
    const auto s = testsupport::protein("MKWVTFISLL");
    double expected = 0.0;
    for (const auto& a : s) expected += (*p.substitution_matrix)(std::get<AminoAcid>(a).code, std::get<AminoAcid>(a).code);
    CHECK(sat(align(k, kConfig, p, s, s).score) == expected);
  }
  SUBCASE("parsed BLOSUM50") {
    ScoringParams p;
    p.substitution_matrix = parse_matrix(testsupport::data_path("BLOSUM50"));
    p.linear_gap = -8;
    const auto q = testsupport::protein("HEAGAWGHEE"), ref = testsupport::protein("PAWHEAE");
    const auto r = align(k, kConfig, p, q, ref);
    CHECK(sat(r.score) == local_with_matrix(q, ref, *p.substitution_matrix, -8));
    CHECK(testsupport::rescore(15, p, q, ref, r.start, r.moves) == sat(r.score));
  }
  SUBCASE("no positive pair") {
    ScoringParams p;
    p.substitution_matrix = Eigen::MatrixXd::Constant(20, 20, -1.0);
    p.linear_gap = -1;
    const auto r = align(k, kConfig, p, testsupport::protein("WWW"), testsupport::protein("CCC"));
    CHECK(sat(r.score) == 0);
  }
}

TEST_CASE("pe_func is pure and tb_transition stays inside the state set") {
  testsupport::Rng rng(42);
  for (const auto& [id, any] : kernel_catalog()) {
    std::visit(
        [&](const auto& spec) {
          using S = typename std::decay_t<decltype(spec)>::scalar_type;
          const auto p = testsupport::random_params(rng, id);
          CellScores<S> up(spec.n_layers), diag(spec.n_layers), left(spec.n_layers);
          for (int l = 0; l < spec.n_layers; ++l) {
            up[l] = ScoreTraits<S>::from_double(rng.uniform(-9, 9));
            diag[l] = ScoreTraits<S>::from_double(rng.uniform(-9, 9));
            left[l] = ScoreTraits<S>::from_double(rng.uniform(-9, 9));
          }
          const auto a = testsupport::random_symbol(rng, spec.symbol_kind);
          const auto b = testsupport::random_symbol(rng, spec.symbol_kind);
          const auto first = spec.pe_func(up, diag, left, a, b, p, Coord{2, 3});
          const auto second = spec.pe_func(up, diag, left, a, b, p, Coord{2, 3});
          CHECK(first.scores == second.scores);
          CHECK(first.pointer == second.pointer);
          if (!spec.has_traceback()) return;
          for (TracebackState st : spec.state_set)
            for (int code = 0; code < (1 << spec.pointer_width); ++code) {
              const auto step = spec.tb_transition(st, static_cast<TracebackPointer>(code));
              CHECK(std::find(spec.state_set.begin(), spec.state_set.end(), step.next) != spec.state_set.end());
            }
        },
        any);
  }
}

TEST_CASE("raising match never lowers the optimum") {
  testsupport::Rng rng(77);
  for (int id : {1, 2, 3, 4, 5, 6, 7}) {
    const auto& spec = std::get<KernelSpec<Sat32>>(kernel_catalog().at(id));
    for (int n = 0; n < 10; ++n) {
      auto p = testsupport::random_params(rng, id);
      const auto pair = testsupport::random_pair(rng, SymbolKind::Nucleotide, 20);
      const auto lo = align(spec, kConfig, p, pair.query, pair.reference).score;
      *p.match += 1;
      CHECK(align(spec, kConfig, p, pair.query, pair.reference).score >= lo);
    }
  }
}

TEST_CASE("negated distances under a maximising DTW give the negated optimum") {
  auto neg = kernel_dtw();
  neg.policy.objective = Objective::Maximize;
  neg.pe_func = [](const CellScores<double>& up, const CellScores<double>& diag, const CellScores<double>& left,
                   const Symbol& q, const Symbol& r, const ScoringParams& p, Coord) {
    PeOutput<double> out{CellScores<double>(1), tbp::kDiag};
    const double d = -sample_distance(std::get<ComplexSample>(q), std::get<ComplexSample>(r),
                                      p.distance_metric.value_or(DistanceMetric::Manhattan));
    double best = diag[0];
    if (up[0] > best) { best = up[0]; out.pointer = tbp::kUp; }
    if (left[0] > best) { best = left[0]; out.pointer = tbp::kLeft; }
    out.scores[0] = d + best;
    return out;
  };
  const auto base_init = neg.init;
  neg.init = [base_init](const ScoringParams& p, int r, int q) {
    auto v = base_init(p, r, q);
    for (auto& c : v.row) c[0] = -c[0];
    for (auto& c : v.col) c[0] = -c[0];
    v.origin[0] = -v.origin[0];
    return v;
  };
  testsupport::Rng rng(19);
  ScoringParams p;
  p.distance_metric = DistanceMetric::Euclidean;
  for (int n = 0; n < 10; ++n) {
    const auto q = testsupport::random_sequence(rng, SymbolKind::ComplexSample, rng.uniform(1, 12));
    const auto ref = testsupport::random_sequence(rng, SymbolKind::ComplexSample, rng.uniform(1, 12));
    CHECK(testsupport::close(align(neg, kConfig, p, q, ref).score, -align(kernel_dtw(), kConfig, p, q, ref).score));
  }
}
