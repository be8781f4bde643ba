#include <doctest.h>

#include <sstream>

#include "popre/io.hpp"

using namespace popre;

TEST_SUITE_BEGIN("io");

TEST_CASE("sample file round trip") {
  SampleBatch batch{{}, NoiseModel(NoiseKind::Erasure, 0.5), 4};
  batch.items.emplace_back("01?1");
  batch.items.emplace_back("????");
  batch.items.emplace_back("0000");
  std::ostringstream os;
  io::write_sample_file(os, batch);
  CHECK(os.str().starts_with("# model=erasure nu=0.5 n=4\n"));

  std::istringstream is(os.str());
  const SampleBatch back = io::load_sample_file(is);
  CHECK(back.n == 4);
  CHECK(back.model.kind == NoiseKind::Erasure);
  CHECK(back.model.nu == doctest::Approx(0.5));
  REQUIRE(back.items.size() == 3);
  CHECK(back.items[0].str() == "01?1");
  CHECK(back.items[1].str() == "????");
}

TEST_CASE("sample file diagnostics carry line numbers") {
  {
    std::istringstream is("# model=erasure nu=0.5 n=3\n010\n0?\n");
    try {
      io::load_sample_file(is);
      FAIL("expected ParseError");
    } catch (const io::ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  {
    std::istringstream is("# model=bitflip nu=0.5 n=2\n0?\n");
    CHECK_THROWS_AS(io::load_sample_file(is), io::ParseError);
  }
  {
    std::istringstream is("no header\n");
    CHECK_THROWS_AS(io::load_sample_file(is), io::ParseError);
  }
  {
    std::istringstream is("# model=waffle nu=0.5 n=2\n00\n");
    CHECK_THROWS_AS(io::load_sample_file(is), io::ParseError);
  }
}

TEST_CASE("distribution spec json round trip") {
  Distribution d;
  d.n = 4;
  d.entries.emplace_back(BitString("0101"), 0.3);
  d.entries.emplace_back(BitString("1111"), 0.7);
  std::ostringstream os;
  io::write_distribution_json(os, d);
  std::istringstream is(os.str());
  const Distribution back = io::load_distribution_json(is);
  CHECK(back.n == 4);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].first.str() == "0101");
  CHECK(back.entries[0].second == doctest::Approx(0.3));
}

TEST_CASE("recovery result json is accepted as a distribution spec") {
  // Masses from a recovery run need not sum to one; renormalization fixes it.
  std::istringstream is(R"({"eps":0.1,"entries":[{"x":"01","p":0.6},{"x":"10","p":0.3}]})");
  const Distribution d = io::load_distribution_json(is, true);
  CHECK(d.n == 2);
  CHECK(d.entries[0].second == doctest::Approx(2.0 / 3.0));
  CHECK(d.entries[1].second == doctest::Approx(1.0 / 3.0));

  std::istringstream bad(R"({"eps":0.1,"entries":[{"x":"01","p":0.6},{"x":"10","p":0.3}]})");
  CHECK_THROWS_AS(io::load_distribution_json(bad, false), std::invalid_argument);
}

TEST_CASE("recovery result serializes to the pinned shape") {
  RecoveryResult result;
  result.eps = 0.1;
  result.entries.emplace_back(BitString("0101"), 0.31);
  const io::json j = io::to_json(result);
  CHECK(j.dump() == R"({"entries":[{"p":0.31,"x":"0101"}],"eps":0.1})");
}

TEST_CASE("report serializers carry the key fields") {
  EstimateReport rep;
  rep.target = BitString("0011");
  rep.estimate = 0.25;
  rep.eps = 0.1;
  rep.samples_used = 640;
  rep.delta_used = 0.05;
  const io::json j = io::to_json(rep);
  CHECK(j["target"] == "0011");
  CHECK(j["estimate"] == doctest::Approx(0.25));
  CHECK(j["samples_used"] == 640);
}

TEST_SUITE_END();
