#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hardyforge/types.hpp"

namespace hardyforge {

// Dense pure state of n >= 2 parties. Flat index order is row-major with
// party 0 most significant: index = sum_k i_k * prod_{j>k} d_j.
class PureState {
 public:
  PureState(std::vector<int> dims, CVec amps);

  const std::vector<int>& dims() const { return dims_; }
  int parties() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
  std::size_t size() const { return amps_.size(); }
  std::span<const cplx> amps() const { return amps_; }
  const CVec& amp_vector() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  // Stride of party k in the flat index.
  std::size_t stride(int k) const;
  double norm() const;
  bool all_qubits() const;

  PureState normalized() const;

 private:
  std::vector<int> dims_;
  CVec amps_;
};

// One local vector per party.
struct ProductVector {
  std::vector<CVec> factors;

  int parties() const { return static_cast<int>(factors.size()); }
  const CVec& operator[](int k) const { return factors[static_cast<std::size_t>(k)]; }
  CVec& operator[](int k) { return factors[static_cast<std::size_t>(k)]; }
};

ProductVector make_product(const std::vector<CVec>& factors);
// Unit vector |i> in dimension d.
CVec basis_vector(int d, int i);

std::size_t total_size(std::span<const int> dims);

// Contracts the axis of `party` with the bra <bra|. Returns the tensor with
// that axis removed; `dims` describes the input tensor.
CVec contract_bra(std::span<const cplx> tensor, std::span<const int> dims, int party,
                  std::span<const cplx> bra);

// Applies a local operator on the axis of `party`.
CVec apply_local(std::span<const cplx> tensor, std::span<const int> dims, int party,
                 const Eigen::MatrixXcd& op);

// <psi|pv>.
cplx inner_product(const PureState& state, const ProductVector& pv);

// chi_k = (prod_{j != k} <v_j|) |psi>, unnormalized. Factor k of `fixed` is ignored.
CVec conditional_vector(const PureState& state, const ProductVector& fixed, int k);

// <psi| (op_1 x ... x op_n) |psi>.
cplx expect_local_product(const PureState& state, std::span<const Eigen::MatrixXcd> ops);

Eigen::MatrixXcd reduced_density(const PureState& state, int k);

// Uniform (Haar) random unit state; deterministic per seed.
PureState haar_random_state(const std::vector<int>& dims, std::uint64_t seed);

// Haar-random d x d unitary (QR of a Ginibre matrix with phase fix).
Eigen::MatrixXcd haar_unitary(int d, std::uint64_t seed);

PureState apply_local_unitaries(const PureState& state,
                                std::span<const Eigen::MatrixXcd> unitaries);

// Reorders parties: new party j is old party perm[j].
PureState permute_parties(const PureState& state, std::span<const int> perm);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hardyforge
