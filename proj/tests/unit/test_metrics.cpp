#include <doctest.h>

#include <random>

#include "../common/oracles.hpp"
#include "pdr/metrics.hpp"

using namespace pdr;
using oracle::scalar_curve;

TEST_CASE("dtw hand values") {
  const auto q = scalar_curve({1, 2, 3});
  CHECK(dtw(q, q).distance == 0.0);

  const MatchResult r = dtw(scalar_curve({1, 3}), scalar_curve({1, 2, 3}));
  CHECK(r.path_cost == 1.0);
  CHECK(r.pairs.size() == 3);
  CHECK(r.distance == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("frechet of a two-point grid") {
  const MatchResult r = frechet(scalar_curve({0, 1}), scalar_curve({0, 3}));
  CHECK(r.distance == 2.0);
  CHECK(r.pairs == std::vector<IndexPair>{{0, 0}, {1, 1}});
}

TEST_CASE("identity gives zero with diagonal pairs") {
  std::mt19937_64 rng(7);
  const Trajectory a = oracle::random_curve(rng, 9, false);
  for (const auto& r : {dtw(a, a), frechet(a, a)}) {
    CHECK(r.distance == 0.0);
    REQUIRE(r.pairs.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(r.pairs[i] == IndexPair{i, i});
  }
}

TEST_CASE("tightest band on equal lengths matches equal sequence numbers") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Trajectory a = oracle::random_curve(rng, 12, false);
    const Trajectory b = oracle::random_curve(rng, 12, false);
    for (const auto& r : {dtw(a, b, 0), frechet(a, b, 0)}) {
      REQUIRE(r.pairs.size() == a.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(r.pairs[i] == IndexPair{i, i});
    }
  }
}

TEST_CASE("band 1 admits one-sample shifts") {
  // |i - j| <= 1 lets a shifted copy be matched off the diagonal.
  const auto a = scalar_curve({0, 1, 2, 3});
  const auto b = scalar_curve({1, 2, 3, 4});
  const MatchResult r = dtw(a, b, 1);
  CHECK(r.path_cost == 2.0);
  CHECK(r.pairs == std::vector<IndexPair>{{0, 0}, {1, 0}, {2, 1}, {3, 2}, {3, 3}});
}

TEST_CASE("dtw and frechet equal exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  for (int rep = 0; rep < 300; ++rep) {
    const bool lattice = rep % 2 == 0;
    const Trajectory a = oracle::random_curve(rng, len(rng), lattice);
    const Trajectory b = oracle::random_curve(rng, len(rng), lattice);
    const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    for (std::optional<std::size_t> band : {std::optional<std::size_t>{}, std::optional<std::size_t>{diff},
                                            std::optional<std::size_t>{diff + 1}}) {
      const auto o = oracle::dtw_oracle(a, b, band);
      const MatchResult d = dtw(a, b, band);
      CHECK(d.path_cost == o.min_sum);
      CHECK(oracle::admissible(d.pairs, a.size(), b.size(), band));
      CHECK(oracle::path_sum(a, b, d.pairs) == o.min_sum);
      CHECK(o.lengths.count(d.pairs.size()) == 1);
      CHECK(d.distance == o.min_sum / static_cast<double>(d.pairs.size()));

      const MatchResult f = frechet(a, b, band);
      CHECK(f.distance == oracle::frechet_oracle(a, b, band));
      CHECK(oracle::admissible(f.pairs, a.size(), b.size(), band));
      CHECK(oracle::path_max(a, b, f.pairs) == f.distance);
    }
  }
}

TEST_CASE("streaming dtw distance is bit-identical") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Trajectory a = oracle::random_curve(rng, 20 + rep % 7, rep % 3 == 0);
    const Trajectory b = oracle::random_curve(rng, 23, rep % 3 == 0);
    CHECK(dtw_distance(a.points, b.points) == dtw(a, b).distance);
    CHECK(dtw_distance(a.points, b.points, 4) == dtw(a, b, 4).distance);
  }
}

TEST_CASE("symmetry and band monotonicity") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const Trajectory a = oracle::random_curve(rng, 15, false);
    const Trajectory b = oracle::random_curve(rng, 13, false);
    CHECK(dtw(a, b).distance == doctest::Approx(dtw(b, a).distance).epsilon(1e-12));
    CHECK(frechet(a, b).distance == frechet(b, a).distance);
    CHECK(dtw(a, b, 3).path_cost >= dtw(a, b).path_cost);
    CHECK(frechet(a, b, 3).distance >= frechet(a, b).distance);
    const MatchResult wide = dtw(a, b, 15);
    const MatchResult full = dtw(a, b);
    CHECK(wide.distance == full.distance);
    CHECK(wide.pairs == full.pairs);
    CHECK(frechet(a, b, 20).distance == frechet(a, b).distance);
  }
}

TEST_CASE("band errors and empty input") {
  const auto a = scalar_curve({0, 1, 2, 3, 4});
  const auto b = scalar_curve({0, 1});
  CHECK_THROWS_AS(dtw(a, b, 2), BandError);
  CHECK_THROWS_AS(frechet(a, b, 1), BandError);
  CHECK_NOTHROW(dtw(a, b, 3));
  CHECK_THROWS_AS(dtw(Trajectory{}, b), InputError);
  CHECK_THROWS_AS(dtw_distance(a.points, b.points, 2), BandError);
}

TEST_CASE("banded storage stays within the bound") {
  const BandDiagnostics big = banded_storage_check(1000, 1000, 50);
  CHECK(big.bound == 101000);
  CHECK(big.within_bound());
  const BandDiagnostics small = banded_storage_check(10, 10, 1);
  CHECK(small.bound == 30);
  CHECK(small.dtw_cells <= 30);
  CHECK(small.frechet_cells <= 30);
  CHECK(banded_storage_check(300, 280, 40).within_bound());
}

TEST_CASE("trajectory validation and length") {
  Trajectory t = scalar_curve({0, 3, 3});
  t.points[2].y() = 4.0;
  CHECK(t.length() == 7.0);
  CHECK_NOTHROW(t.validate());
  t.timestamps = {0.0, 1.0};
  CHECK_THROWS_AS(t.validate(), InputError);
  t.timestamps.clear();
  t.points[1].x() = std::nan("");
  CHECK_THROWS_AS(t.validate(), InputError);
}
