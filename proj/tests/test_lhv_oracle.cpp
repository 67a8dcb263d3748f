#include <doctest.h>

#include "hardyforge/hardy_evaluator.hpp"
#include "hardyforge/lhv_oracle.hpp"
#include "oracles.hpp"

using namespace hardyforge;

namespace {

std::pair<std::vector<int>, std::vector<int>> unpack(const Assignment& x) {
  std::vector<int> a, b;
  for (int k = 0; k < x.n; ++k) {
    a.push_back(x.a(k));
    b.push_back(x.b(k));
  }
  return {a, b};
}

}  // namespace

TEST_CASE("hardy_value matches the literal definition") {
  for (int n = 2; n <= 5; ++n)
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * n)); ++bits) {
      const Assignment x{bits, n};
      const auto [a, b] = unpack(x);
      CHECK(hardy_value(x) == oracle::hardy_h(a, b));
    }
}

TEST_CASE("classical maximum for two and three parties") {
  const ClassicalMax two = classical_max(2);
  CHECK(two.max_value == 0);
  CHECK(two.assignments == 16);
  CHECK(two.maximizer_count > 0);
  for (const auto& x : two.sample_maximizers) CHECK(hardy_value(x) == 0);

  const ClassicalMax three = classical_max(3);
  CHECK(three.max_value == 0);
  CHECK(three.assignments == 64);
  std::uint64_t count = 0;
  for (std::uint64_t bits = 0; bits < 64; ++bits) count += hardy_value({bits, 3}) == 0;
  CHECK(three.maximizer_count == count);
}

TEST_CASE("classical bound and contextual impossibility") {
  for (int n = 2; n <= 8; ++n) {
    CHECK(classical_bound(n) == 0);
    CHECK(contextual_impossibility(n));
  }
  CHECK_THROWS_AS(classical_max(1), Error);
  CHECK_THROWS_AS(classical_max(14), Error);
}

TEST_CASE("random mixtures of local strategies stay below the bound") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << (2 * n)) - 1);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    double total = 0.0, h = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double wj = w(rng);
      total += wj;
      h += wj * hardy_value({pick(rng), n});
    }
    CHECK(h / total <= 1e-15);
  }
}

TEST_CASE("joint_distribution reproduces the report") {
  const std::vector<std::vector<int>> shapes{{2, 2}, {2, 3, 2}, {3, 3}, {2, 2, 2, 2}};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto& dims = shapes[seed % shapes.size()];
    const PureState s = haar_random_state(dims, 500 + seed);
    const MeasurementSettings m = oracle::random_settings(dims, 600 + seed);
    const JointTable t = joint_distribution(s, m);
    const HardyReport r = quantum_value(s, m, {.margin = 1e-9, .with_lhv = false});
    CHECK(std::abs(t.p_a_all() - r.p_a) < 1e-12);
    CHECK(std::abs(t.p_bbar_all() - r.p_bbar) < 1e-12);
    for (int k = 0; k < s.parties(); ++k) CHECK(std::abs(t.p_cross(k) - r.p_cross[k]) < 1e-12);
    CHECK(t.normalization_residual <= 1e-10);
    CHECK(t.no_signaling_residual <= 1e-10);
    CHECK(t.marginal_residual <= 1e-10);
    for (const auto& row : t.dist)
      for (double p : row) CHECK(p >= -1e-15);
  }
}

TEST_CASE("joint_distribution rejects mismatched settings") {
  const PureState s = haar_random_state({2, 2}, 1);
  CHECK_THROWS_AS(joint_distribution(s, oracle::random_settings({2, 2, 2}, 1)), Error);
  CHECK_THROWS_AS(joint_distribution(s, oracle::random_settings({3, 2}, 1)), Error);
}
