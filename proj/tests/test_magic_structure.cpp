#include <doctest.h>

#include "hardyforge/magic_structure.hpp"
#include "hardyforge/product_optimizer.hpp"
#include "oracles.hpp"

using namespace hardyforge;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double r3 = 1.0 / std::sqrt(3.0);

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

PureState mixed5() {
  CVec a(32);
  a[0b00000] = a[0b00111] = a[0b11111] = r3;
  return PureState({2, 2, 2, 2, 2}, a);
}

std::vector<CVec> uniform(int n, int i) { return std::vector<CVec>(static_cast<std::size_t>(n), basis_vector(2, i)); }

MagicFrame frame_of(const PureState& s) { return magic_frame(s, closest_product(s).pv); }

// h_alpha straight from its definition.
cplx h_oracle(const PureState& s, const MagicFrame& f, SubsetMask alpha) {
  std::vector<CVec> factors;
  for (int k = 0; k < s.parties(); ++k) factors.push_back(alpha.contains(k) ? f.e0[k] : f.e1[k]);
  return oracle::inner(s, factors);
}

}  // namespace

TEST_CASE("GHZ3: magic degree 0") {
  const MagicFrame f = frame_of(ghz3());
  CHECK(f.m == 0);
  CHECK(f.A.empty());
  CHECK(std::abs(std::norm(f.h_I()) - 0.5) < 1e-9);
  CHECK(std::abs(std::norm(f.h_at(SubsetMask{})) - 0.5) < 1e-9);
  CHECK(validate_magic_frame(f).empty());
}

TEST_CASE("W3: h_I = 2/3 and h_A = -1/3 in the real gauge") {
  const MagicFrame f = frame_of(w3());
  CHECK(f.m == 1);
  CHECK(f.A.size() == 1);
  CHECK(std::abs(f.h_I() - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(f.h_A() + 1.0 / 3.0) < 1e-9);
  CHECK(validate_magic_frame(f).empty());
}

TEST_CASE("mixed five-party state in the computational frame") {
  const MagicFrame f = frame_from_bases(mixed5(), uniform(5, 0), uniform(5, 1));
  CHECK(f.m == 2);
  CHECK(f.A == SubsetMask(0b00011));
  CHECK(validate_magic_frame(f).empty());

  const MagicFrame flipped = frame_from_bases(mixed5(), uniform(5, 1), uniform(5, 0));
  CHECK(flipped.m == 3);
  CHECK(flipped.A == SubsetMask(0b11100));
}

TEST_CASE("a frame with one party swapped fails validation") {
  auto e0 = uniform(3, 0), e1 = uniform(3, 1);
  std::swap(e0[1], e1[1]);
  const MagicFrame f = frame_from_bases(ghz3(), e0, e1);
  CHECK(std::abs(f.h_I()) < 1e-15);
  CHECK_FALSE(validate_magic_frame(f).empty());
}

TEST_CASE("frame coefficients match their definition and the projected state") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PureState s = haar_random_state({2, 3, 2, 2}, 50 + seed);
    const MagicFrame f = frame_of(s);
    const int n = s.parties();
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      const SubsetMask alpha(bits);
      const cplx h = h_oracle(s, f, alpha);
      CHECK(std::abs(f.h_at(alpha) - h) < 1e-12);
      CHECK(std::abs(std::conj(f.projected[frame_index(alpha, n)]) - h) < 1e-12);
    }
    // h_{k-bar} vanishes and h_I is the closest-product overlap.
    for (int k = 0; k < n; ++k) CHECK(std::abs(f.h_at(SubsetMask::full(n).without(k))) < 1e-7);
    CHECK(f.h_I().real() > 0.0);
    CHECK(std::abs(f.h_I().imag()) < 1e-12);
    CHECK(std::abs(std::abs(f.h_I()) - closest_product(s).overlap) < 1e-9);
    CHECK(f.m <= n - 2);
    CHECK(validate_magic_frame(f).empty());
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(vec_norm(f.e0[k]) - 1.0) < 1e-12);
      CHECK(std::abs(vec_norm(f.e1[k]) - 1.0) < 1e-12);
      CHECK(std::abs(vdot(f.e0[k], f.e1[k])) < 1e-12);
    }
  }
}

TEST_CASE("residual tensor norms match a dense projector sandwich") {
  const PureState s = haar_random_state({2, 3, 2}, 77);
  const ProductVector p = closest_product(s).pv;
  const int n = s.parties();
  for (std::uint32_t bits = 0; bits + 1 < (1u << n); ++bits) {
    std::vector<Eigen::MatrixXcd> ops;
    for (int k = 0; k < n; ++k) {
      const Eigen::MatrixXcd pk = oracle::projector(p[k]);
      ops.push_back((bits >> k) & 1u ? pk : Eigen::MatrixXcd::Identity(pk.rows(), pk.cols()) - pk);
    }
    const ResidualTensor g = residual_tensor(s, p, SubsetMask(bits));
    CHECK(std::abs(g.norm * g.norm - oracle::expectation(s, ops)) < 1e-12);
  }
}

TEST_CASE("collection excludes the full set and every k-bar at a stationary point") {
  const PureState s = haar_random_state({2, 2, 2, 2}, 5);
  const ProductVector p = closest_product(s).pv;
  const auto c = collection(s, p, 1e-9);
  CHECK_FALSE(c.empty());
  for (SubsetMask a : c) {
    CHECK(a != SubsetMask::full(4));
    CHECK(a.size() <= 2);
  }
  CHECK(std::is_sorted(c.begin(), c.end()));
}

TEST_CASE("magic degree is invariant under party relabeling") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 4 + static_cast<int>(seed % 2);
    const int m = static_cast<int>(seed % static_cast<std::uint64_t>(n - 1));
    const auto inst = oracle::random_hardy_instance(n, m, 900 + seed);
    const MagicFrame f = frame_from_bases(inst.state, inst.e0, inst.e1);
    CHECK(f.m == m);

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) perm[j] = (j + 1 + static_cast<int>(seed)) % n;
    std::vector<CVec> e0, e1;
    for (int j = 0; j < n; ++j) {
      e0.push_back(inst.e0[perm[j]]);
      e1.push_back(inst.e1[perm[j]]);
    }
    const MagicFrame g = frame_from_bases(permute_parties(inst.state, perm), e0, e1);
    CHECK(g.m == f.m);
    CHECK(std::abs(std::abs(g.h_I()) - std::abs(f.h_I())) < 1e-12);
  }
}
