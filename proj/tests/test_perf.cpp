#include <doctest.h>

#include "dphls/perf.hpp"

#include <sstream>

using namespace dphls;

namespace {

EngineConfig with(int n_pe, int ii = 1) {
  EngineConfig c;
  c.n_pe = n_pe;
  c.ii = ii;
  return c;
}

}  // namespace

TEST_CASE("fill cycles for 256x256 on 32 PEs") {
  const auto r = model_alignment_cycles(with(32), 256, 256, 256);
  CHECK(r.fill_cycles == 2296);
  CHECK(r.traceback_cycles == 257);
  CHECK(r.reduction_cycles == 6);
  CHECK(r.total_cycles == r.fill_cycles + r.traceback_cycles + r.reduction_cycles + r.overhead_cycles);
  CHECK(simulate_schedule(with(32), 256, 256).fill_cycles == 2296);
}

TEST_CASE("one PE degenerates to sequential") {
  CHECK(model_alignment_cycles(with(1), 40, 70, 10).fill_cycles == 2800);
  CHECK(model_alignment_cycles(with(1, 3), 40, 70, 10).fill_cycles == 8400);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(model_alignment_cycles(with(0), 4, 4, 4), Error);
  CHECK_THROWS_AS(model_alignment_cycles(with(4), 0, 4, 0), Error);
  CHECK_THROWS_AS(model_alignment_cycles(with(4), 4, 4, 9), Error);
  CHECK_THROWS_AS(simulate_schedule(with(4), 1025, 4), Error);
}

TEST_CASE("2x2 trace") {
  const auto t = simulate_schedule(with(2), 2, 2);
  REQUIRE(t.events.size() == 3);
  CHECK(t.events[0].active_pes == 1);
  CHECK(t.events[1].active_pes == 2);
  CHECK(t.events[2].active_pes == 1);
  CHECK(t.fill_cycles == 3);
}

TEST_CASE("utilisation rises with reference length") {
  double previous = 0.0;
  for (int r : {64, 256, 1024}) {
    const double u = simulate_schedule(with(32), 256, r).utilization();
    CHECK(u > previous);
    CHECK(u <= 1.0);
    previous = u;
  }
}

TEST_CASE("ii scales fill linearly") {
  for (int n_pe : {1, 8, 32})
    CHECK(simulate_schedule(with(n_pe, 2), 100, 37).fill_cycles == 2 * simulate_schedule(with(n_pe), 100, 37).fill_cycles);
}

TEST_CASE("throughput monotonicity") {
  const auto base = model_alignment_cycles(with(16), 256, 256, 256).alignments_per_second;
  EngineConfig more_blocks = with(16);
  more_blocks.n_b = 2;
  CHECK(model_alignment_cycles(more_blocks, 256, 256, 256).alignments_per_second == doctest::Approx(2 * base));
  EngineConfig more_channels = with(16);
  more_channels.n_k = 3;
  CHECK(model_alignment_cycles(more_channels, 256, 256, 256).alignments_per_second > base);
  CHECK(model_alignment_cycles(with(16, 2), 256, 256, 256).alignments_per_second < base);
  // PEs beyond the query length buy nothing
  CHECK(model_alignment_cycles(with(64), 32, 256, 32).fill_cycles == model_alignment_cycles(with(32), 32, 256, 32).fill_cycles);
}

TEST_CASE("sweep, slopes and CSV") {
  const std::vector<int> pes{1, 2, 4, 8, 16, 32, 64};
  const std::vector<int> blocks{1, 2, 4};
  const auto rows = scaling_sweep(EngineConfig{}, pes, blocks, 256, 256, 256);
  CHECK(rows.size() == pes.size() * blocks.size());
  std::ostringstream csv;
  write_csv(csv, rows);
  const std::string text = csv.str();
  CHECK(text.rfind("n_pe,n_b,n_k,ii,clock_mhz,fill,tb,total,throughput\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rows.size() + 1));

  const std::vector<double> xs{1, 2, 4, 8}, ys{3, 6, 12, 24};
  CHECK(loglog_slope(xs, ys) == doctest::Approx(1.0));
  CHECK(strictly_concave(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 4, 4.5}));
  CHECK_FALSE(strictly_concave(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
  CHECK(format_report(model_alignment_cycles(with(32), 256, 256, 256)).find("2296") != std::string::npos);
}

TEST_CASE("published configurations") {
  const auto rows = published_throughput();
  CHECK(rows.size() == 15);
  CHECK(rows[0].kernel_id == 1);
  CHECK(rows[0].n_pe == 64);
  CHECK(rows[0].n_b == 16);
  CHECK(rows[0].n_k == 4);
  CHECK(rows[0].clock_mhz == 250.0);
  CHECK(rows[0].alignments_per_second == 3.51e6);
}
