#pragma once

#include <cstdint>
#include <vector>

#include "hardyforge/settings.hpp"
#include "hardyforge/statekit.hpp"

namespace hardyforge {

// Deterministic local assignment, 2n bits: bit k is a_k, bit n+k is b_k.
struct Assignment {
  std::uint64_t bits = 0;
  int n = 0;

  bool a(int k) const { return (bits >> k) & 1u; }
  bool b(int k) const { return (bits >> (n + k)) & 1u; }
};

// H = a_I - bbar_I - sum_k b_k a_{k-bar} with bbar_k = 1 - b_k.
int hardy_value(const Assignment& x);

struct ClassicalMax {
  int max_value = 0;
  std::uint64_t maximizer_count = 0;
  std::vector<Assignment> sample_maximizers;  // first few in enumeration order
  std::uint64_t assignments = 0;
};

// Exhaustive maximum of H over all 4^n assignments, 2 <= n <= 13.
ClassicalMax classical_max(int n);

// Memoized maximum value only.
int classical_bound(int n);

// True iff no assignment has a_I = 1, bbar_I = 0 and every b_k a_{k-bar} = 0.
bool contextual_impossibility(int n);

// Outcome statistics for every setting combination. Combination bit k set
// means party k measures b; outcome bit k is party k's result.
struct JointTable {
  int n = 0;
  std::vector<std::vector<double>> dist;  // [combination][outcome]
  double normalization_residual = 0.0;
  double no_signaling_residual = 0.0;
  double marginal_residual = 0.0;  // single-party marginals vs. reduced states

  double p_a_all() const;
  double p_bbar_all() const;
  double p_cross(int k) const;
};

// Independent path: local basis changes and binning of |amplitude|^2, no
// projector algebra. Requires n <= 6.
JointTable joint_distribution(const PureState& state, const MeasurementSettings& settings);

}  // namespace hardyforge
