#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smartjam/channel.hpp"
#include "smartjam/error.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>

using namespace smartjam;

namespace {

SystemConfig cfg_of(int B, int U) {
  SystemConfig cfg;
  cfg.B = B;
  cfg.U = U;
  cfg.T = U;
  cfg.D = 4;
  cfg.K = U + 4;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("smartjam_" + name)).string();
}

}  // namespace

TEST_CASE("Rayleigh entries are unit-variance and uncorrelated") {
  const SystemConfig cfg = cfg_of(64, 8);
  Rng rng(1);
  double sum2 = 0.0;
  std::size_t n = 0;
  cplx cross = 0.0;
  const int draws = 2000;
  for (int d = 0; d < draws; ++d) {
    const ChannelRealization ch = rayleigh(cfg, rng);
    CHECK(numerical_rank(ch.H) == cfg.U);
    CHECK(satisfies_invariants(ch));
    sum2 += ch.H.squaredNorm() + ch.j.squaredNorm();
    n += static_cast<std::size_t>(ch.H.size() + ch.j.size());
    cross += ch.H.col(0).dot(ch.H.col(1));
  }
  CHECK(std::abs(sum2 / static_cast<double>(n) - 1.0) < 0.02);
  // Re and Im of h_0^H h_1 each have variance B / 2 per draw
  const double sigma = std::sqrt(cfg.B / 2.0 / draws);
  CHECK(std::abs(cross.real() / draws) < 3.0 * sigma);
  CHECK(std::abs(cross.imag() / draws) < 3.0 * sigma);
}

TEST_CASE("power control") {
  const SystemConfig cfg = cfg_of(32, 8);
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    ChannelRealization ch = rayleigh(cfg, rng);
    for (int u = 0; u < cfg.U; ++u) ch.H.col(u) *= std::pow(10.0, (u - 4) * 0.2);

    const ChannelRealization flat = power_control(ch, 0.0);
    const double p0 = flat.H.col(0).squaredNorm();
    for (int u = 1; u < cfg.U; ++u) CHECK(flat.H.col(u).squaredNorm() == doctest::Approx(p0).epsilon(1e-12));

    const ChannelRealization pc = power_control(ch, 1.5);
    double pmax = 0.0, pmin = 1e300;
    for (int u = 0; u < cfg.U; ++u) {
      const double p = pc.H.col(u).squaredNorm();
      pmax = std::max(pmax, p);
      pmin = std::min(pmin, p);
      CHECK(std::abs(testutil::abs_cosine(pc.H.col(u), ch.H.col(u)) - 1.0) < 1e-12);
      // ordering preserved
      for (int v = 0; v < cfg.U; ++v) {
        if (ch.H.col(u).squaredNorm() < ch.H.col(v).squaredNorm()) {
          CHECK(pc.H.col(u).squaredNorm() <= pc.H.col(v).squaredNorm() * (1 + 1e-12));
        }
      }
    }
    CHECK(pmax / pmin <= 2.0);
    CHECK((pc.j - ch.j).norm() == 0.0);
  }
  CHECK_THROWS_AS(power_control(rayleigh(cfg, rng), -1.0), Error);
}

TEST_CASE("channel file roundtrip is bitwise") {
  const SystemConfig cfg = cfg_of(8, 3);
  Rng rng(3);
  std::vector<ChannelRealization> recs;
  for (int i = 0; i < 5; ++i) recs.push_back(rayleigh(cfg, rng));
  const std::string path = temp_path("roundtrip.chn");
  export_channels(path, recs);
  CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 8 + 5 * (8 * 3 + 8) * 16);
  std::vector<std::uint64_t> skipped;
  const auto back = import_channels(path, &skipped);
  REQUIRE(back.size() == recs.size());
  CHECK(skipped.empty());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].H == recs[i].H);
    CHECK(back[i].j == recs[i].j);
    CHECK(satisfies_invariants(back[i]));
  }
  ChannelReader reader(path, 8, 3);
  CHECK(reader.record_count() == 5);
  CHECK_THROWS_AS(ChannelReader(path, 16, 3), Error);
  std::filesystem::remove(path);
}

TEST_CASE("truncated file names the record") {
  const SystemConfig cfg = cfg_of(8, 3);
  Rng rng(4);
  std::vector<ChannelRealization> recs;
  for (int i = 0; i < 3; ++i) recs.push_back(rayleigh(cfg, rng));
  const std::string path = temp_path("truncated.chn");
  export_channels(path, recs);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 100);
  try {
    (void)import_channels(path);
    FAIL("expected Parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("record 2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("bad magic is a parse error") {
  const std::string path = temp_path("magic.chn");
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTACHANNELFILE.........";
  }
  CHECK_THROWS_AS(ChannelReader{path}, Error);
  std::filesystem::remove(path);
}

TEST_CASE("a jammer inside span(H) is skipped") {
  const SystemConfig cfg = cfg_of(8, 3);
  Rng rng(5);
  std::vector<ChannelRealization> recs;
  for (int i = 0; i < 3; ++i) recs.push_back(rayleigh(cfg, rng));
  recs[1].j = recs[1].H * testutil::random_cvec(rng, 3);
  CHECK_FALSE(satisfies_invariants(recs[1]));
  CHECK(jammer_span_residual(recs[1].H, recs[1].j) < 1e-10);
  const std::string path = temp_path("span.chn");
  export_channels(path, recs);
  std::vector<std::uint64_t> skipped;
  const auto back = import_channels(path, &skipped);
  CHECK(back.size() == 2);
  CHECK(skipped == std::vector<std::uint64_t>{1});
  CHECK(back[1].H == recs[2].H);
  std::filesystem::remove(path);
}
