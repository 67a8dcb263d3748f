#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardyforge/statekit.hpp"

namespace hardyforge {

struct OptimizerConfig {
  int restarts = 0;          // 0 selects 16 + 8n
  int max_iters = 2000;      // sweeps per restart
  double tol = 1e-12;        // overlap gain per sweep
  double certify_threshold = 1e-8;
  int polish_iters = 50000;  // extra sweeps spent on the best restart
  double polish_residual = 1e-14;
  std::uint64_t seed = 0;
};

struct ClosestProductResult {
  ProductVector pv;
  double overlap = 0.0;  // |<psi|p_I>|
  int restarts_used = 0;
  std::vector<double> residuals;
  bool certified = false;
  int sweeps = 0;
};

struct AlternatingRun {
  ProductVector pv;
  std::vector<double> trace;  // overlap after each sweep
  bool converged = false;
};

// One run of alternating maximization: p_k <- chi_k / |chi_k| swept over
// k = 1..n until the overlap gain per sweep drops below tol.
AlternatingRun alternating_maximization(const PureState& state, ProductVector init,
                                        int max_iters, double tol);

// Best of several alternating runs (first start from the dominant eigenvectors
// of the single-party reduced states, the rest Haar random), polished and
// phase-fixed so the largest component of each factor is real positive.
ClosestProductResult closest_product(const PureState& state, const OptimizerConfig& config = {});

// residual_k = |(I - |p_k><p_k|) chi_k|.
std::vector<double> stationarity_residuals(const PureState& state, const ProductVector& pv);

struct EntanglementVerdict {
  bool entangled = false;
  double overlap = 0.0;
  bool collection_nonempty = false;
  std::string certificate;
};

// Lambda <= 1 - tol, cross-checked against a non-empty collection C. Throws
// construction_failed when the two criteria disagree.
EntanglementVerdict is_entangled(const PureState& state, const ClosestProductResult& result,
                                 double tol = 1e-9, double eps_c = 1e-9);

// Multiplies v by a phase so its largest-magnitude component is real positive.
CVec fix_phase(CVec v);

}  // namespace hardyforge
