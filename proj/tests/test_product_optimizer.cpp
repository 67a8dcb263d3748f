#include <doctest.h>

#include "hardyforge/magic_structure.hpp"
#include "hardyforge/product_optimizer.hpp"
#include "oracles.hpp"

using namespace hardyforge;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double r3 = 1.0 / std::sqrt(3.0);

PureState w3() {
  CVec a(8);
  a[1] = a[2] = a[4] = r3;
  return PureState({2, 2, 2}, a);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("W state: overlap 2/3 at p ~ sqrt2|0> + |1>") {
  const auto r = closest_product(w3());
  CHECK(std::abs(r.overlap - 2.0 / 3.0) < 1e-9);
  CHECK(r.certified);
  CHECK(max_of(r.residuals) <= 1e-8);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(std::abs(r.pv[k][0]) - std::sqrt(2.0) * r3) < 1e-8);
    CHECK(std::abs(std::abs(r.pv[k][1]) - r3) < 1e-8);
  }
}

TEST_CASE("product state: overlap 1, factors recovered up to phase") {
  const CVec plus{r2, r2};
  const CVec tilted{0.6, cplx{0.0, 0.8}};
  const PureState s({2, 2}, oracle::kron({plus, tilted}));
  const auto r = closest_product(s);
  CHECK(std::abs(r.overlap - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(vdot(r.pv[0], plus)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(vdot(r.pv[1], tilted)) - 1.0) < 1e-12);
  CHECK_FALSE(is_entangled(s, r).entangled);
}

TEST_CASE("0.8|00> + 0.6|11>: overlap 0.8 at (|0>, |0>)") {
  const PureState s({2, 2}, {0.8, 0.0, 0.0, 0.6});
  const auto r = closest_product(s);
  CHECK(std::abs(r.overlap - 0.8) < 1e-12);
  CHECK(std::abs(std::abs(r.pv[0][0]) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(r.pv[1][0]) - 1.0) < 1e-12);

  // Grid over Bloch angles never beats it.
  double best = 0.0;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 60; ++j) {
      const double t1 = M_PI * i / 60, t2 = M_PI * j / 60;
      const CVec p{std::cos(t1 / 2), std::sin(t1 / 2)}, q{std::cos(t2 / 2), std::sin(t2 / 2)};
      best = std::max(best, std::abs(oracle::inner(s, {p, q})));
    }
  CHECK(best <= 0.8 + 1e-12);
}

TEST_CASE("stationarity residual examples") {
  const PureState bell({2, 2}, {r2, 0.0, 0.0, r2});
  const auto zero = stationarity_residuals(bell, make_product({basis_vector(2, 0), basis_vector(2, 0)}));
  CHECK(zero[0] < 1e-15);
  CHECK(zero[1] < 1e-15);
  const auto tilted = stationarity_residuals(bell, make_product({CVec{r2, r2}, basis_vector(2, 0)}));
  CHECK(std::abs(tilted[1] - 0.5) < 1e-15);
}

TEST_CASE("alternating runs never decrease the overlap") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PureState s = haar_random_state({2, 3, 2, 2}, seed);
    std::mt19937_64 rng(seed);
    ProductVector init;
    for (int d : s.dims()) init.factors.push_back(oracle::random_vector(d, rng));
    const auto run = alternating_maximization(s, init, 500, 1e-13);
    for (std::size_t i = 1; i < run.trace.size(); ++i) CHECK(run.trace[i] >= run.trace[i - 1] - 1e-14);
  }
}

TEST_CASE("bipartite overlap equals the largest Schmidt coefficient") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::vector<int> dims{2 + static_cast<int>(seed % 3), 2 + static_cast<int>(seed % 2)};
    const PureState s = haar_random_state(dims, 100 + seed);
    Eigen::MatrixXcd m(dims[0], dims[1]);
    for (int i = 0; i < dims[0]; ++i)
      for (int j = 0; j < dims[1]; ++j) m(i, j) = s[static_cast<std::size_t>(i * dims[1] + j)];
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
    CHECK(std::abs(closest_product(s).overlap - sigma) < 1e-9);
  }
}

TEST_CASE("is_entangled examples") {
  CVec g(8);
  g[0] = g[7] = r2;
  const PureState ghz({2, 2, 2}, g);
  const auto rg = closest_product(ghz);
  CHECK(std::abs(rg.overlap - r2) < 1e-9);
  CHECK(is_entangled(ghz, rg).entangled);
  CHECK(is_entangled(w3(), closest_product(w3())).entangled);
  const PureState plus({2, 2}, {r2, r2, 0.0, 0.0});
  CHECK_FALSE(is_entangled(plus, closest_product(plus)).entangled);
}

TEST_CASE("entanglement verdict agrees with a nonempty collection on random states") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PureState s = haar_random_state({2, 2, 2, 2}, 300 + seed);
    const auto r = closest_product(s);
    const auto v = is_entangled(s, r);
    CHECK(v.entangled == v.collection_nonempty);
    CHECK(r.overlap <= 1.0 + 1e-12);
  }
}

TEST_CASE("restarts are deterministic for a fixed seed") {
  const PureState s = haar_random_state({2, 2, 2}, 4);
  OptimizerConfig c;
  c.seed = 9;
  const auto a = closest_product(s, c), b = closest_product(s, c);
  CHECK(a.overlap == b.overlap);
  for (int k = 0; k < 3; ++k) CHECK(a.pv[k] == b.pv[k]);
}
