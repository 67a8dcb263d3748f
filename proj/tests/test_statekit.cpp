#include <doctest.h>

#include <random>

#include "hardyforge/statekit.hpp"
#include "oracles.hpp"

using namespace hardyforge;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double r3 = 1.0 / std::sqrt(3.0);

PureState bell_state() { return PureState({2, 2}, {r2, 0.0, 0.0, r2}); }

PureState ghz3() {
  CVec a(8);
  a[0] = a[7] = r2;
  return PureState({2, 2, 2}, a);
}

PureState w3() {
  CVec a(8);
  a[1] = a[2] = a[4] = r3;
  return PureState({2, 2, 2}, a);
}

ProductVector random_pv(const std::vector<int>& dims, std::mt19937_64& rng) {
  ProductVector pv;
  for (int d : dims) pv.factors.push_back(oracle::random_vector(d, rng));
  return pv;
}

}  // namespace

TEST_CASE("PureState validates shape") {
  CHECK_THROWS_AS(PureState({2}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(PureState({2, 1}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(PureState({2, 2}, {1.0, 0.0, 0.0}), Error);
  const PureState s({2, 3}, CVec(6, 1.0));
  CHECK(s.stride(0) == 3);
  CHECK(s.stride(1) == 1);
  CHECK(s.normalized().norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner_product examples") {
  CHECK(std::abs(inner_product(bell_state(), make_product({basis_vector(2, 0), basis_vector(2, 0)})) - r2) < 1e-15);
  CHECK(std::abs(inner_product(ghz3(), make_product({basis_vector(2, 0), basis_vector(2, 0), basis_vector(2, 1)}))) ==
        0.0);
  // p = (sqrt2|0> + |1>)/sqrt3 is the maximizer for this W state.
  const CVec p{std::sqrt(2.0) * r3, r3};
  CHECK(std::abs(inner_product(w3(), make_product({p, p, p})) - 2.0 / 3.0) < 1e-15);
  // (|0> + sqrt2|1>)/sqrt3 only reaches sqrt2/3.
  const CVec q{r3, std::sqrt(2.0) * r3};
  CHECK(std::abs(inner_product(w3(), make_product({q, q, q})) - std::sqrt(2.0) / 3.0) < 1e-15);
}

TEST_CASE("inner_product matches the full Kronecker sum on random inputs") {
  std::mt19937_64 rng(11);
  for (const auto& dims : std::vector<std::vector<int>>{{2, 2}, {3, 2, 4}, {2, 2, 2, 2, 2}, {3, 3, 3}}) {
    const PureState s = haar_random_state(dims, 5);
    const ProductVector pv = random_pv(dims, rng);
    CHECK(std::abs(inner_product(s, pv) - oracle::inner(s, pv.factors)) < 1e-12);
  }
}

TEST_CASE("inner_product is conjugate-linear in the state and linear in each factor") {
  std::mt19937_64 rng(3);
  const std::vector<int> dims{2, 3, 2};
  const PureState s1 = haar_random_state(dims, 1), s2 = haar_random_state(dims, 2);
  const ProductVector pv = random_pv(dims, rng);
  const cplx c{0.3, -1.7};
  CVec mix(s1.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = c * s1[i] + s2[i];
  const cplx lhs = inner_product(PureState(dims, mix), pv);
  const cplx rhs = std::conj(c) * inner_product(s1, pv) + inner_product(s2, pv);
  CHECK(std::abs(lhs - rhs) < 1e-12);

  ProductVector scaled = pv;
  for (auto& x : scaled[1]) x *= c;
  CHECK(std::abs(inner_product(s1, scaled) - c * inner_product(s1, pv)) < 1e-12);
}

TEST_CASE("conditional_vector examples") {
  const CVec zero = basis_vector(2, 0), one = basis_vector(2, 1);
  const CVec g = conditional_vector(ghz3(), make_product({zero, zero, zero}), 2);
  CHECK(std::abs(g[0] - r2) < 1e-15);
  CHECK(std::abs(g[1]) < 1e-15);

  const CVec w = conditional_vector(w3(), make_product({zero, one, one}), 0);
  CHECK(vec_norm(w) < 1e-15);

  const CVec plus{r2, r2};
  const CVec b = conditional_vector(bell_state(), make_product({plus, zero}), 1);
  CHECK(std::abs(b[0] - 0.5) < 1e-15);
  CHECK(std::abs(b[1] - 0.5) < 1e-15);
}

TEST_CASE("conditional_vector composed with the last factor gives inner_product") {
  std::mt19937_64 rng(8);
  for (const auto& dims : std::vector<std::vector<int>>{{2, 2, 2, 2}, {3, 2, 4}, {2, 3}}) {
    const PureState s = haar_random_state(dims, 17);
    const ProductVector pv = random_pv(dims, rng);
    for (int k = 0; k < s.parties(); ++k) {
      const CVec chi = conditional_vector(s, pv, k);
      // <psi|pv> = conj(<pv_k|chi_k>)
      CHECK(std::abs(std::conj(vdot(pv[k], chi)) - inner_product(s, pv)) < 1e-12);
    }
  }
}

TEST_CASE("expect_local_product agrees with a dense operator") {
  std::mt19937_64 rng(2);
  const std::vector<int> dims{2, 3, 2};
  const PureState s = haar_random_state(dims, 9);
  std::vector<Eigen::MatrixXcd> ops;
  for (int d : dims) ops.push_back(Eigen::MatrixXcd::Random(d, d));
  const Eigen::VectorXcd psi = oracle::to_eigen(s.amp_vector());
  const cplx dense = (psi.adjoint() * oracle::kron(ops) * psi)(0, 0);
  CHECK(std::abs(expect_local_product(s, ops) - dense) < 1e-12);
}

TEST_CASE("reduced_density has unit trace and matches a partial trace") {
  const PureState s = haar_random_state({2, 3, 2}, 4);
  const Eigen::MatrixXcd rho = reduced_density(s, 1);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cplx want{0.0, 0.0};
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) want += s[a * 6 + i * 2 + c] * std::conj(s[a * 6 + j * 2 + c]);
      CHECK(std::abs(rho(i, j) - want) < 1e-12);
    }
}

TEST_CASE("haar_random_state is normalized and deterministic") {
  const PureState a = haar_random_state({2, 2}, 7), b = haar_random_state({2, 2}, 7);
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(a.amp_vector() == b.amp_vector());
  CHECK(haar_random_state({2, 2}, 8).amp_vector() != a.amp_vector());
}

TEST_CASE("haar_random_state first moment") {
  const int samples = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double p = std::norm(haar_random_state({2, 2, 2}, 1000 + i)[0]);
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
  CHECK(std::abs(mean - 1.0 / 8.0) < 3.0 * se);
}

TEST_CASE("haar_unitary is unitary") {
  const Eigen::MatrixXcd u = haar_unitary(4, 3);
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("permute_parties reorders the tensor") {
  const PureState s = haar_random_state({2, 3, 4}, 21);
  const std::vector<int> perm{2, 0, 1};
  const PureState t = permute_parties(s, perm);
  CHECK(t.dims() == std::vector<int>{4, 2, 3});
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    const auto d = oracle::digits(flat, s.dims());
    const std::size_t idx = (static_cast<std::size_t>(d[2]) * 2 + d[0]) * 3 + d[1];
    CHECK(t[idx] == s[flat]);
  }
}
