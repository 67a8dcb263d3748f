#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hardyforge/magic_structure.hpp"
#include "hardyforge/settings.hpp"
#include "hardyforge/statekit.hpp"

namespace hardyforge {

// Probability weight routed through the complements Q_k. The positive term can
// only gain; the subtracted terms can only lose.
struct Leakage {
  double a_gain = 0.0;
  double bbar_loss = 0.0;
  std::vector<double> cross_loss;

  double total_loss() const;
};

struct HardyReport {
  double p_a = 0.0;     // P(a_k = 1 for all k)
  double p_bbar = 0.0;  // P(b_k = 0 for all k)
  std::vector<double> p_cross;  // P(b_k = 1, a_j = 1 for j != k)
  double value = 0.0;
  double subspace_value = 0.0;  // same combination from the frame parts only
  Leakage leakage;
  std::optional<double> closed_form;
  double lhv_bound = 0.0;
  double margin = 1e-9;
  bool violation = false;
};

struct EvaluationOptions {
  double margin = 1e-9;
  bool with_lhv = true;  // false: lhv_bound stays 0 and no enumeration runs
};

// Exact outcome probabilities under the settings' complement policies.
// Throws on dimension mismatch or non-orthonormal settings.
HardyReport quantum_value(const PureState& state, const MeasurementSettings& settings,
                          const EvaluationOptions& options = {});

// |y^s h_A h_I (1-z)|^2 / ((1+y^2)^s (|h_I|^2 + |y^s h_A z|^2)). Refuses a
// perturbed plan, for which the formula no longer applies.
double closed_form_hardy(const MagicFrame& frame, const HardyPlan& plan);

struct HardyFlags {
  bool bbar_zero = false;
  bool cross_zero = false;
  bool a_positive = false;
  bool all() const { return bbar_zero && cross_zero && a_positive; }
};

HardyFlags hardy_flags(const HardyReport& report, double tol = 1e-10);

Leakage leakage_report(const PureState& state, const MeasurementSettings& settings);

struct PolicySearchResult {
  std::vector<ComplementPolicy> policy_a, policy_b;
  HardyReport report;
  HardyReport default_report;
  std::size_t combinations = 0;
};

// Exhaustive over per-party (policy_a, policy_b) for n <= 8; keeps the best value.
PolicySearchResult search_policy(const PureState& state, const MeasurementSettings& settings);

struct AscentConfig {
  int max_sweeps = 20;
  double tol = 1e-10;
  int restarts = 3;
  std::uint64_t seed = 0;
};

struct AscentResult {
  MeasurementSettings settings;
  std::vector<double> trace;  // value after each accepted party update
};

// Coordinate ascent over each party's (a_k, b_k) inside its local frame.
AscentResult maximize_violation(const PureState& state, const MeasurementSettings& start,
                                const AscentConfig& config = {});

// Throws unless settings match the state and every party is orthonormal.
void check_settings(const PureState& state, const MeasurementSettings& settings, double tol = 1e-10);

}  // namespace hardyforge
