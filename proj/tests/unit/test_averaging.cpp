#include <doctest.h>

#include <algorithm>
#include <random>

#include "../common/oracles.hpp"
#include "pdr/averaging.hpp"

using namespace pdr;

namespace {

Trajectory line(std::size_t n, const Vec3& offset) {
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    t.points.push_back(Vec3(0.5 * static_cast<double>(i), 0, 0) + offset);
    t.timestamps.push_back(0.01 * static_cast<double>(i));
  }
  return t;
}

bool on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm() <= 1e-12;
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + s * ab - p).norm() <= 1e-12;
}

}  // namespace

TEST_CASE("average of a curve with itself is the curve") {
  std::mt19937_64 rng(1);
  const Trajectory a = oracle::random_curve(rng, 30, false);
  const Trajectory avg = average_paths(a, a, dtw(a, a));
  CHECK(avg.points == a.points);
  CHECK_FALSE(avg.has_timestamps());
  CHECK(average_paths_timed(a, a).points == a.points);
}

TEST_CASE("parallel lines average to the midline") {
  const Trajectory a = line(20, Vec3::Zero());
  const Trajectory b = line(20, Vec3(0, 2, 0));
  const Trajectory avg = average_paths(a, b, dtw(a, b, 1));
  REQUIRE(avg.size() == 20);
  for (std::size_t i = 0; i < avg.size(); ++i) CHECK((avg.points[i] - line(20, Vec3(0, 1, 0)).points[i]).norm() < 1e-15);
}

TEST_CASE("midpoints lie between their parents") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const Trajectory a = oracle::random_curve(rng, 25, false);
    const Trajectory b = oracle::random_curve(rng, 18, false);
    const MatchResult m = dtw(a, b);
    const Trajectory avg = average_paths(a, b, m, {.collapse_duplicates = false});
    REQUIRE(avg.size() == m.pairs.size());
    for (std::size_t k = 0; k < m.pairs.size(); ++k) {
      const auto [i, j] = m.pairs[k];
      CHECK(on_segment(avg.points[k], a.points[i], b.points[j]));
    }
  }
}

TEST_CASE("swapping inputs with the transposed match gives the same points") {
  std::mt19937_64 rng(3);
  const Trajectory a = oracle::random_curve(rng, 12, false);
  const Trajectory b = oracle::random_curve(rng, 15, false);
  const MatchResult m = dtw(a, b);
  MatchResult t = m;
  for (auto& p : t.pairs) std::swap(p.first, p.second);
  const Trajectory ab = average_paths(a, b, m);
  const Trajectory ba = average_paths(b, a, t);
  CHECK(ab.points == ba.points);
}

TEST_CASE("one-sided repeats are collapsed unless disabled") {
  const Trajectory a = oracle::scalar_curve({0, 0, 4});
  const Trajectory b = oracle::scalar_curve({0, 4});
  MatchResult m;
  m.pairs = {{0, 0}, {1, 0}, {2, 1}};
  CHECK(average_paths(a, b, m).size() == 2);
  CHECK(average_paths(a, b, m, {.collapse_duplicates = false}).size() == 3);
  m.pairs.push_back({5, 1});
  CHECK_THROWS_AS(average_paths(a, b, m), InputError);
}

TEST_CASE("timed averaging") {
  Trajectory a = line(10, Vec3::Zero());
  Trajectory b = line(10, Vec3(0, 2, 0));
  for (auto& t : b.timestamps) t += 0.004;
  const Trajectory avg = average_paths_timed(a, b);
  REQUIRE(avg.has_timestamps());
  CHECK(avg.timestamps[3] == doctest::Approx(0.032));

  MatchResult diagonal;
  for (std::size_t i = 0; i < 10; ++i) diagonal.pairs.emplace_back(i, i);
  CHECK(average_paths(a, b, diagonal).points == avg.points);

  CHECK_THROWS_AS(average_paths_timed(line(10, Vec3::Zero()), line(11, Vec3::Zero())), InputError);
}
