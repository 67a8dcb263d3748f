#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardyforge/magic_structure.hpp"
#include "hardyforge/settings.hpp"

namespace hardyforge {

// Coefficients in ascending order: coeffs[j] multiplies z^j.
struct Polynomial {
  std::vector<cplx> coeffs;
  double scale = 0.0;  // sum of term magnitudes, for relative zero tests

  cplx operator()(cplx z) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
};

// Drops leading coefficients below rel_tol * scale.
Polynomial trimmed(Polynomial p, double rel_tol = 1e-12);

// All roots of a polynomial with nonzero leading coefficient: eigenvalues of
// the companion matrix, each polished by Newton steps.
std::vector<cplx> polynomial_roots(const Polynomial& p);

// ---- m = n-2 ----

BellPlan bell_parameters(const MagicFrame& frame, double gamma);

std::pair<BellPlan, MeasurementSettings> plan_bell(const MagicFrame& frame, double gamma);

// |h_I|^2 (1 - 2q^2 - (n-2) sin^2 gamma) - |<psi|bbar_I>|^2.
double bell_value(const MagicFrame& frame, double gamma);

struct GammaChoice {
  double gamma = 0.0;  // 0 when A is empty
  double value = 0.0;
  int halvings = 0;
};

GammaChoice choose_gamma(const MagicFrame& frame);

// ---- m < n-2 ----

// c_k as a function of z: c_k(z) = c0 + c1 z.
struct CkLinear {
  cplx c0, c1;
  cplx at(cplx z) const { return c0 + c1 * z; }
};

std::vector<std::pair<int, CkLinear>> ck_coefficients(const MagicFrame& frame, int v, double y);

// Unnormalized frame coordinates of (a, b, bbar) for one party.
struct RawParty {
  Coord2 a{}, b{}, bbar{};
};

// The Hardy-scenario rows for every party at (v, y, z).
std::vector<RawParty> hardy_rows(const MagicFrame& frame, int v, double y, cplx z);

// P(z) = <bbar_I(z)|psi'> on the projected state.
Polynomial hardy_polynomial(const MagicFrame& frame, SubsetMask S, int v, double y);

// Closed-form Hardy value from the frame coefficients.
double hardy_closed_form(const MagicFrame& frame, int s, double y, cplx z);

struct YTrial {
  double y = 0.0;
  int degree = -1;  // -1: P vanished identically
  std::vector<cplx> roots;
  int admissible = 0;
  std::optional<cplx> best_z;
  double best_value = 0.0;
};

struct YZResult {
  double y = 0.0;
  cplx z;
  double value = 0.0;
  std::vector<YTrial> trials;
  std::string root_method = "companion eigenvalues + Newton polish";
};

struct SynthesisConfig {
  std::uint64_t seed = 0;
  int random_y_trials = 64;
  std::optional<int> fixed_v;  // 0-based; unset means exhaustive over the complement of A
  std::optional<double> fixed_y;
};

// Fixed y candidates tried before the seeded random ones.
std::span<const double> y_ladder();

YZResult find_y_z(const MagicFrame& frame, SubsetMask S, int v, const SynthesisConfig& config = {});

std::pair<HardyPlan, MeasurementSettings> plan_hardy(const MagicFrame& frame,
                                                     const SynthesisConfig& config = {});

// Builds Hardy settings from an explicit plan (x perturbations included).
MeasurementSettings hardy_settings(const MagicFrame& frame, const HardyPlan& plan);

struct RepairResult {
  MeasurementSettings settings;
  double value = 0.0;  // frame-subspace value after repair
  double x = 0.0;
  int halvings = 0;
  bool changed = false;
};

// Perturbs the first b coordinate of degenerate parties until all of them are
// nondegenerate and the value stays positive (and within 10% of the start).
RepairResult degeneracy_fix(const MeasurementSettings& settings, const MagicFrame& frame);

// Re-embeds through the frame and attaches complement policies. Empty spans keep
// the defaults: Q_k joins outcome 0 of a_k and outcome 1 of b_k.
MeasurementSettings embed_qudit(const MeasurementSettings& settings, const MagicFrame& frame,
                                std::span<const ComplementPolicy> policy_a = {},
                                std::span<const ComplementPolicy> policy_b = {});

}  // namespace hardyforge
