#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardyforge/statekit.hpp"

namespace hardyforge {

// G_alpha = (prod_{k not in alpha} (I - |p_k><p_k|)) (prod_{k in alpha} <p_k|) |psi>,
// a tensor over the parties outside alpha (in increasing party order).
struct ResidualTensor {
  SubsetMask alpha;
  std::vector<int> dims;
  CVec tensor;
  double norm = 0.0;
};

ResidualTensor residual_tensor(const PureState& state, const ProductVector& pv, SubsetMask alpha);

// All proper subsets alpha with |G_alpha| > eps_c, in increasing mask order.
std::vector<SubsetMask> collection(const PureState& state, const ProductVector& pv, double eps_c);

struct FrameConfig {
  double eps_c = 1e-9;
  int als_restarts = 8;
  std::uint64_t seed = 0;
};

// Local qubit frames (e0_k, e1_k) with the expansion coefficients
// h_alpha = <psi| e0_alpha e1_{complement}>. `h` is indexed by the raw mask bits.
struct MagicFrame {
  PureState source;
  std::vector<CVec> e0;
  std::vector<CVec> e1;
  CVec h;
  int m = 0;
  SubsetMask A;
  std::vector<SubsetMask> collection;
  // Amplitudes of the locally projected n-qubit state; index bit for party k
  // sits at position n-1-k and is 1 for e1.
  CVec projected;
  double threshold = 1e-9;

  int parties() const { return source.parties(); }
  cplx h_at(SubsetMask alpha) const { return h[alpha.bits]; }
  cplx h_I() const { return h[SubsetMask::full(parties()).bits]; }
  cplx h_A() const { return h[A.bits]; }
  PureState projected_state() const;
};

// Index of |e0_alpha e1_rest> in MagicFrame::projected.
std::size_t frame_index(SubsetMask alpha, int n);

// Builds the frame from a stationary product vector: e0 = p, e1 on parties
// outside A from a rank-one approximation of G_A, e1 on A from the dominant
// residual direction of the reduced state. The phase of e0 on the first party
// is chosen so that h_I is real positive.
MagicFrame magic_frame(const PureState& state, const ProductVector& pv, const FrameConfig& config = {});

// Frame from caller-supplied local bases; m, A and C are computed, not assumed.
MagicFrame frame_from_bases(const PureState& state, std::vector<CVec> e0, std::vector<CVec> e1,
                            double eps_c = 1e-9);

// Empty result means the frame satisfies every magic-basis condition.
std::vector<std::string> validate_magic_frame(const MagicFrame& frame, double tol = 1e-8,
                                              std::uint64_t seed = 0);

}  // namespace hardyforge
