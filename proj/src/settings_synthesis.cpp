#include "hardyforge/settings_synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hardyforge/hardy_evaluator.hpp"
#include "hardyforge/parallel.hpp"

namespace hardyforge {

cplx Polynomial::operator()(cplx z) const {
  cplx acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial trimmed(Polynomial p, double rel_tol) {
  while (!p.coeffs.empty() && std::abs(p.coeffs.back()) <= rel_tol * p.scale) p.coeffs.pop_back();
  return p;
}

namespace {

cplx derivative_at(const Polynomial& p, cplx z) {
  cplx acc{0.0, 0.0};
  for (int j = p.degree(); j >= 1; --j) acc = acc * z + static_cast<double>(j) * p.coeffs[j];
  return acc;
}

cplx newton_polish(const Polynomial& p, cplx z) {
  for (int it = 0; it < 30; ++it) {
    const cplx val = p(z);
    const cplx der = derivative_at(p, z);
    if (std::abs(der) == 0.0) break;
    const cplx next = z - val / der;
    if (!(std::abs(p(next)) < std::abs(val))) break;
    z = next;
  }
  return z;
}

}  // namespace

std::vector<cplx> polynomial_roots(const Polynomial& p) {
  const int d = p.degree();
  if (d < 1) return {};
  if (std::abs(p.coeffs.back()) == 0.0)
    throw Error(ErrorCode::invalid_argument, "leading coefficient is zero");
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -p.coeffs[i] / p.coeffs[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots;
  roots.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) roots.push_back(newton_polish(p, solver.eigenvalues()[i]));
  return roots;
}

// ---------------------------------------------------------------- Bell

BellPlan bell_parameters(const MagicFrame& frame, double gamma) {
  const cplx ratio = frame.h_A() / frame.h_I();
  BellPlan plan;
  plan.gamma = gamma;
  plan.lambda = std::abs(ratio);
  plan.theta = std::arg(ratio);
  plan.q = std::sqrt(plan.lambda) / (1.0 + plan.lambda);
  plan.r = cplx{0.0, 1.0} * std::polar(1.0, -plan.theta / 2.0) * std::sqrt(1.0 - plan.q * plan.q);
  return plan;
}

namespace {

void require_bell(const MagicFrame& frame) {
  if (frame.m != frame.parties() - 2)
    throw Error(ErrorCode::invalid_argument,
                "Bell construction needs m = n-2, frame has m = " + std::to_string(frame.m));
}

std::array<Coord2, 2> bell_rows(const BellPlan& plan, bool in_A) {
  if (in_A) {
    const double c = std::cos(plan.gamma), s = std::sin(plan.gamma);
    return {Coord2{cplx{-s, 0.0}, cplx{c, 0.0}}, Coord2{cplx{c, 0.0}, cplx{s, 0.0}}};
  }
  return {Coord2{cplx{plan.q, 0.0}, plan.r}, Coord2{-std::conj(plan.r), cplx{plan.q, 0.0}}};
}

}  // namespace

std::pair<BellPlan, MeasurementSettings> plan_bell(const MagicFrame& frame, double gamma) {
  require_bell(frame);
  const BellPlan plan = bell_parameters(frame, gamma);
  MeasurementSettings out;
  out.scenario = Scenario::bell;
  out.A = frame.A;
  for (int k = 0; k < frame.parties(); ++k) {
    const auto [b, bbar] = bell_rows(plan, frame.A.contains(k));
    out.parties.push_back(make_party(frame.e0[k], frame.e1[k], Coord2{1.0, 0.0}, b, bbar));
  }
  out.bell = plan;
  return {plan, out};
}

double bell_value(const MagicFrame& frame, double gamma) {
  require_bell(frame);
  const int n = frame.parties();
  const BellPlan plan = bell_parameters(frame, gamma);
  std::vector<Coord2> bbar(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) bbar[k] = bell_rows(plan, frame.A.contains(k))[1];

  // <psi|bbar_I> = sum over e0-sets alpha of prod_k bbar_k(alpha) h_alpha
  cplx overlap{0.0, 0.0};
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const cplx h = frame.h[mask];
    if (h == cplx{}) continue;
    cplx term = h;
    for (int k = 0; k < n; ++k) term *= ((mask >> k) & 1u) ? bbar[k][0] : bbar[k][1];
    overlap += term;
  }
  const double sg = std::sin(gamma);
  return std::norm(frame.h_I()) * (1.0 - 2.0 * plan.q * plan.q - (n - 2) * sg * sg) - std::norm(overlap);
}

GammaChoice choose_gamma(const MagicFrame& frame) {
  require_bell(frame);
  const double base = bell_value(frame, 0.0);
  if (frame.A.empty()) return {0.0, base, 0};
  double gamma = std::numbers::pi / 16.0;
  for (int i = 0; i < 60; ++i, gamma *= 0.5) {
    const double value = bell_value(frame, gamma);
    if (value > 0.0 && value >= 0.5 * base && nondegenerate(plan_bell(frame, gamma).second))
      return {gamma, value, i};
  }
  throw Error(ErrorCode::construction_failed, "no gamma in (0, pi/16] keeps half of the gamma = 0 value");
}

// ---------------------------------------------------------------- Hardy

namespace {

void require_hardy(const MagicFrame& frame, int v) {
  const int n = frame.parties();
  if (frame.m >= n - 2)
    throw Error(ErrorCode::invalid_argument,
                "Hardy construction needs m < n-2, frame has m = " + std::to_string(frame.m));
  if (v < 0 || v >= n || frame.A.contains(v))
    throw Error(ErrorCode::invalid_argument, "v must be a party outside A");
}

int hardy_s(const MagicFrame& frame) { return frame.parties() - frame.m - 1; }

}  // namespace

std::vector<std::pair<int, CkLinear>> ck_coefficients(const MagicFrame& frame, int v, double y) {
  require_hardy(frame, v);
  const int n = frame.parties();
  const SubsetMask S = frame.A.complement(n).without(v);
  const cplx hA = frame.h_A(), hI = frame.h_I();
  const double ys = std::pow(y, hardy_s(frame));
  std::vector<std::pair<int, CkLinear>> out;
  for (int k : frame.A.members(n)) {
    const SubsetMask rest = frame.A.without(k);
    CkLinear c;
    for (int kp : S.members(n)) c.c0 += frame.h_at(rest.with(kp)) / (y * hA);
    c.c0 += frame.h_at(rest) / hA;
    c.c1 = -ys * frame.h_at(rest.with(v)) / hI;
    out.emplace_back(k, c);
  }
  return out;
}

std::vector<RawParty> hardy_rows(const MagicFrame& frame, int v, double y, cplx z) {
  if (y == 0.0) throw Error(ErrorCode::invalid_argument, "y must be nonzero");
  const int n = frame.parties();
  const auto cks = ck_coefficients(frame, v, y);
  const cplx hA = frame.h_A(), hI = frame.h_I();
  const double ys = std::pow(y, hardy_s(frame));
  const cplx e = -hA * ys * z / hI;
  const cplx f = hI / (ys * hA);

  std::vector<RawParty> rows(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    RawParty& r = rows[k];
    if (k == v) {
      r.a = {e, 1.0};
      r.b = {-1.0, f};
      r.bbar = {std::conj(f), 1.0};
    } else if (!frame.A.contains(k)) {
      r.a = {1.0, y};
      r.b = {1.0, y * z};
      r.bbar = {-y * std::conj(z), 1.0};
    }
  }
  for (const auto& [k, lin] : cks) {
    const cplx c = lin.at(z);
    rows[k].a = {1.0, 0.0};
    rows[k].b = {c, z - 1.0};
    rows[k].bbar = {1.0 - std::conj(z), std::conj(c)};
  }
  return rows;
}

Polynomial hardy_polynomial(const MagicFrame& frame, SubsetMask S, int v, double y) {
  if (y == 0.0) throw Error(ErrorCode::invalid_argument, "y must be nonzero");
  require_hardy(frame, v);
  const int n = frame.parties();
  if (S != frame.A.complement(n).without(v))
    throw Error(ErrorCode::invalid_argument, "S must be the complement of A without v");
  const double ys = std::pow(y, hardy_s(frame));
  const cplx f = frame.h_I() / (ys * frame.h_A());

  // Bra coefficient of party k on e0 / e1 as (constant, slope) in z.
  using Linear = std::array<cplx, 2>;
  std::vector<std::array<Linear, 2>> bra(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (k == v)
      bra[k] = {Linear{f, 0.0}, Linear{1.0, 0.0}};
    else if (S.contains(k))
      bra[k] = {Linear{0.0, -y}, Linear{1.0, 0.0}};
  }
  for (const auto& [k, lin] : ck_coefficients(frame, v, y)) bra[k] = {Linear{1.0, -1.0}, Linear{lin.c0, lin.c1}};

  Polynomial p;
  p.coeffs.assign(static_cast<std::size_t>(n) + 1, cplx{});
  std::vector<double> scale(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<cplx> term(static_cast<std::size_t>(n) + 1);
  std::vector<double> mag(static_cast<std::size_t>(n) + 1);
  for (std::size_t idx = 0; idx < frame.projected.size(); ++idx) {
    const cplx amp = frame.projected[idx];
    if (amp == cplx{}) continue;
    std::fill(term.begin(), term.end(), cplx{});
    std::fill(mag.begin(), mag.end(), 0.0);
    term[0] = amp;
    mag[0] = std::abs(amp);
    int deg = 0;
    for (int k = 0; k < n; ++k) {
      const Linear& lin = bra[k][(idx >> (n - 1 - k)) & 1u];
      for (int j = deg + 1; j >= 1; --j) {
        term[j] = term[j] * lin[0] + term[j - 1] * lin[1];
        mag[j] = mag[j] * std::abs(lin[0]) + mag[j - 1] * std::abs(lin[1]);
      }
      term[0] *= lin[0];
      mag[0] *= std::abs(lin[0]);
      ++deg;
    }
    for (int j = 0; j <= n; ++j) {
      p.coeffs[j] += term[j];
      scale[j] += mag[j];
    }
  }
  p.scale = *std::max_element(scale.begin(), scale.end());
  return p;
}

double hardy_closed_form(const MagicFrame& frame, int s, double y, cplx z) {
  HardyPlan plan;
  plan.s = s;
  plan.y = y;
  plan.z = z;
  return closed_form_hardy(frame, plan);
}

std::span<const double> y_ladder() {
  static constexpr std::array<double, 16> ladder{1.0,  2.0,  0.5,       -1.0, 1.5,  2.0 / 3.0, -2.0, -0.5,
                                                 3.0,  1.0 / 3.0, -1.5, -2.0 / 3.0, 2.5, 0.4, -3.0, -1.0 / 3.0};
  return ladder;
}

namespace {

// True when candidate (value, z) should replace the incumbent.
bool better_root(double value, cplx z, double best_value, cplx best_z) {
  const double tie = 1e-10 * std::max(std::abs(value), std::abs(best_value));
  if (value > best_value + tie) return true;
  if (value < best_value - tie) return false;
  const double da = std::arg(z) - std::arg(best_z);
  if (std::abs(da) > 1e-12) return da < 0.0;
  return std::abs(z) < std::abs(best_z);
}

YTrial try_y(const MagicFrame& frame, SubsetMask S, int v, double y) {
  const int s = hardy_s(frame);
  YTrial trial;
  trial.y = y;
  const Polynomial p = trimmed(hardy_polynomial(frame, S, v, y));
  if (p.is_zero()) {
    // Every z solves P = 0; take the maximizer of the closed form.
    const double ys = std::pow(y, s);
    const cplx z{-std::norm(frame.h_I()) / std::norm(ys * frame.h_A()), 0.0};
    trial.best_z = z;
    trial.best_value = hardy_closed_form(frame, s, y, z);
    trial.admissible = 1;
    return trial;
  }
  trial.degree = p.degree();
  trial.roots = polynomial_roots(p);
  for (const cplx z : trial.roots) {
    if (!(std::abs(z - 1.0) > 1e-6)) continue;
    ++trial.admissible;
    const double value = hardy_closed_form(frame, s, y, z);
    if (!trial.best_z || better_root(value, z, trial.best_value, *trial.best_z)) {
      trial.best_z = z;
      trial.best_value = value;
    }
  }
  return trial;
}

}  // namespace

YZResult find_y_z(const MagicFrame& frame, SubsetMask S, int v, const SynthesisConfig& config) {
  require_hardy(frame, v);
  YZResult out;
  auto attempt = [&](double y) {
    out.trials.push_back(try_y(frame, S, v, y));
    const YTrial& t = out.trials.back();
    if (t.best_z && t.best_value > 0.0) {
      out.y = y;
      out.z = *t.best_z;
      out.value = t.best_value;
      return true;
    }
    return false;
  };

  if (config.fixed_y) {
    if (attempt(*config.fixed_y)) return out;
  } else {
    for (double y : y_ladder())
      if (attempt(y)) return out;
    std::mt19937_64 rng(splitmix64(config.seed ^ 0x9e3779b97f4a7c15ull));
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < config.random_y_trials; ++i) {
      double y = dist(rng);
      if (std::abs(y) < 1e-3) continue;
      if (attempt(y)) return out;
    }
  }

  std::ostringstream msg;
  msg << "no y gives an admissible root with positive value (v = " << v + 1 << ")";
  for (const auto& t : out.trials) msg << "; y=" << t.y << " degree " << t.degree << " admissible " << t.admissible;
  throw Error(ErrorCode::construction_failed, msg.str());
}

MeasurementSettings hardy_settings(const MagicFrame& frame, const HardyPlan& plan) {
  const int n = frame.parties();
  const auto rows = hardy_rows(frame, plan.v, plan.y, plan.z);
  MeasurementSettings out;
  out.scenario = Scenario::hardy;
  out.A = frame.A;
  for (int k = 0; k < n; ++k) {
    Coord2 b = normalized(rows[k].b);
    Coord2 bbar = normalized(rows[k].bbar);
    const double x = k < static_cast<int>(plan.x.size()) ? plan.x[k] : 0.0;
    if (x != 0.0) {
      b[0] += x;
      b = normalized(b);
      const cplx ov = std::conj(b[0]) * bbar[0] + std::conj(b[1]) * bbar[1];
      bbar = normalized(Coord2{bbar[0] - ov * b[0], bbar[1] - ov * b[1]});
    }
    out.parties.push_back(make_party(frame.e0[k], frame.e1[k], rows[k].a, b, bbar));
  }
  out.hardy = plan;
  out.closed_form_stale = plan.perturbed();
  return out;
}

std::pair<HardyPlan, MeasurementSettings> plan_hardy(const MagicFrame& frame, const SynthesisConfig& config) {
  const int n = frame.parties();
  if (frame.m >= n - 2)
    throw Error(ErrorCode::invalid_argument, "Hardy construction needs m < n-2");
  const SubsetMask Abar = frame.A.complement(n);
  std::vector<int> candidates;
  if (config.fixed_v) {
    if (!Abar.contains(*config.fixed_v))
      throw Error(ErrorCode::invalid_argument, "requested v lies in A");
    candidates.push_back(*config.fixed_v);
  } else {
    candidates = Abar.members(n);
  }

  std::vector<std::optional<YZResult>> results(candidates.size());
  std::vector<std::string> failures(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    const int v = candidates[i];
    try {
      results[i] = find_y_z(frame, Abar.without(v), v, config);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!results[i]) continue;
    if (!best || results[i]->value > results[*best]->value * (1.0 + 1e-12)) best = i;
  }
  if (!best) {
    std::string msg = "Hardy construction failed for every v";
    for (const auto& f : failures) msg += "; " + f;
    throw Error(ErrorCode::construction_failed, msg);
  }

  const YZResult& r = *results[*best];
  HardyPlan plan;
  plan.v = candidates[*best];
  plan.S = Abar.without(plan.v);
  plan.s = hardy_s(frame);
  plan.y = r.y;
  plan.z = r.z;
  for (const auto& [k, lin] : ck_coefficients(frame, plan.v, plan.y)) plan.c[k] = lin.at(plan.z);
  const double ys = std::pow(plan.y, plan.s);
  plan.e = -frame.h_A() * ys * plan.z / frame.h_I();
  plan.f = frame.h_I() / (ys * frame.h_A());
  plan.x.assign(static_cast<std::size_t>(n), 0.0);
  return {plan, hardy_settings(frame, plan)};
}

// ---------------------------------------------------------------- repair

namespace {

double subspace_value(const MagicFrame& frame, const MeasurementSettings& s) {
  return quantum_value(frame.source, s, {.margin = 1e-9, .with_lhv = false}).subspace_value;
}

MeasurementSettings perturb(const MeasurementSettings& base, const MagicFrame& frame,
                            const std::vector<bool>& degenerate, double x) {
  const int n = base.size();
  if (base.hardy) {
    HardyPlan plan = *base.hardy;
    plan.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k)
      if (degenerate[k]) plan.x[k] = x;
    MeasurementSettings out = hardy_settings(frame, plan);
    for (int k = 0; k < n; ++k) {
      out.parties[k].policy_a = base.parties[k].policy_a;
      out.parties[k].policy_b = base.parties[k].policy_b;
    }
    return out;
  }
  MeasurementSettings out = base;
  if (out.bell) out.bell->x.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (!degenerate[k]) continue;
    const PartySettings& p = base.parties[k];
    Coord2 b = p.b_frame;
    b[0] += x;
    b = normalized(b);
    const cplx ov = std::conj(b[0]) * p.bbar_frame[0] + std::conj(b[1]) * p.bbar_frame[1];
    const Coord2 bbar = normalized(Coord2{p.bbar_frame[0] - ov * b[0], p.bbar_frame[1] - ov * b[1]});
    PartySettings q = make_party(p.e0, p.e1, p.a_frame, b, bbar);
    q.policy_a = p.policy_a;
    q.policy_b = p.policy_b;
    out.parties[k] = std::move(q);
    if (out.bell) out.bell->x[k] = x;
  }
  out.closed_form_stale = true;
  return out;
}

}  // namespace

RepairResult degeneracy_fix(const MeasurementSettings& settings, const MagicFrame& frame) {
  RepairResult out;
  out.settings = settings;
  if (nondegenerate(settings)) {
    out.value = subspace_value(frame, settings);
    return out;
  }

  MeasurementSettings start = settings;
  if (start.scenario == Scenario::bell && start.bell && start.bell->gamma == 0.0 && !frame.A.empty()) {
    auto replanned = plan_bell(frame, choose_gamma(frame).gamma).second;
    for (int k = 0; k < start.size(); ++k) {
      replanned.parties[k].policy_a = start.parties[k].policy_a;
      replanned.parties[k].policy_b = start.parties[k].policy_b;
    }
    start = std::move(replanned);
    out.changed = true;
    if (nondegenerate(start)) {
      out.settings = start;
      out.value = subspace_value(frame, start);
      return out;
    }
  }

  const double base = subspace_value(frame, start);
  std::vector<bool> degenerate;
  for (const auto& p : start.parties) degenerate.push_back(!(degeneracy(p) > 1e-6));

  double x = 0.1;
  for (int i = 0; i < 60; ++i, x *= 0.5) {
    MeasurementSettings trial = perturb(start, frame, degenerate, x);
    const double value = subspace_value(frame, trial);
    if (value > 0.0 && (base <= 0.0 || value >= 0.9 * base) && nondegenerate(trial)) {
      out.settings = std::move(trial);
      out.value = value;
      out.x = x;
      out.halvings = i;
      out.changed = true;
      return out;
    }
  }
  throw Error(ErrorCode::construction_failed, "degeneracy repair did not converge within 60 halvings");
}

MeasurementSettings embed_qudit(const MeasurementSettings& settings, const MagicFrame& frame,
                                std::span<const ComplementPolicy> policy_a,
                                std::span<const ComplementPolicy> policy_b) {
  const int n = settings.size();
  if (n != frame.parties()) throw Error(ErrorCode::dimension_mismatch, "settings and frame disagree on n");
  if ((!policy_a.empty() && static_cast<int>(policy_a.size()) != n) ||
      (!policy_b.empty() && static_cast<int>(policy_b.size()) != n))
    throw Error(ErrorCode::dimension_mismatch, "one complement policy per party expected");
  MeasurementSettings out = settings;
  for (int k = 0; k < n; ++k) {
    const PartySettings& p = settings.parties[k];
    PartySettings q = make_party(frame.e0[k], frame.e1[k], p.a_frame, p.b_frame, p.bbar_frame);
    q.policy_a = policy_a.empty() ? ComplementPolicy::to_outcome_0 : policy_a[k];
    q.policy_b = policy_b.empty() ? ComplementPolicy::to_outcome_1 : policy_b[k];
    out.parties[k] = std::move(q);
  }
  return out;
}

}  // namespace hardyforge
