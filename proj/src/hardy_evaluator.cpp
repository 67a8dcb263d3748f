#include "hardyforge/hardy_evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hardyforge/lhv_oracle.hpp"
#include "hardyforge/parallel.hpp"

namespace hardyforge {

double Leakage::total_loss() const {
  return bbar_loss + std::accumulate(cross_loss.begin(), cross_loss.end(), 0.0);
}

void check_settings(const PureState& state, const MeasurementSettings& settings, double tol) {
  const int n = state.parties();
  if (settings.size() != n)
    throw Error(ErrorCode::dimension_mismatch, "settings describe " + std::to_string(settings.size()) +
                                                   " parties, state has " + std::to_string(n));
  for (int k = 0; k < n; ++k) {
    const PartySettings& p = settings.parties[k];
    const auto d = static_cast<std::size_t>(state.dim(k));
    if (p.a.size() != d || p.b.size() != d || p.bbar.size() != d)
      throw Error(ErrorCode::dimension_mismatch, "settings dimension differs for party " + std::to_string(k + 1));
    const std::string who = "party " + std::to_string(k + 1);
    if (std::abs(vec_norm(p.a) - 1.0) > tol || std::abs(vec_norm(p.b) - 1.0) > tol ||
        std::abs(vec_norm(p.bbar) - 1.0) > tol)
      throw Error(ErrorCode::non_orthonormal, who + ": measurement vectors must be unit norm");
    if (std::abs(vdot(p.bbar, p.b)) > tol)
      throw Error(ErrorCode::non_orthonormal, who + ": b and bbar are not orthogonal");
    CVec rest = p.a;
    const cplx cb = vdot(p.b, p.a), cbb = vdot(p.bbar, p.a);
    for (std::size_t i = 0; i < d; ++i) rest[i] -= cb * p.b[i] + cbb * p.bbar[i];
    if (vec_norm(rest) > tol)
      throw Error(ErrorCode::non_orthonormal, who + ": a is outside span{b, bbar}");
  }
}

namespace {

Eigen::MatrixXcd outer(const CVec& v) {
  const auto d = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = v[r] * std::conj(v[c]);
  return m;
}

struct PartyProjectors {
  Eigen::MatrixXcd a1, b1, b0;
};

PartyProjectors projectors(const PartySettings& p) {
  const Eigen::MatrixXcd rb = outer(p.b), rbb = outer(p.bbar);
  const auto d = static_cast<Eigen::Index>(p.b.size());
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(d, d) - rb - rbb;
  PartyProjectors pp;
  pp.a1 = outer(p.a);
  if (p.policy_a == ComplementPolicy::to_outcome_1) pp.a1 += q;
  pp.b1 = rb;
  pp.b0 = rbb;
  if (p.policy_b == ComplementPolicy::to_outcome_1)
    pp.b1 += q;
  else
    pp.b0 += q;
  return pp;
}

HardyReport evaluate(const PureState& state, const MeasurementSettings& settings, const EvaluationOptions& options) {
  const int n = state.parties();
  std::vector<PartyProjectors> proj;
  proj.reserve(static_cast<std::size_t>(n));
  for (const auto& p : settings.parties) proj.push_back(projectors(p));

  HardyReport rep;
  rep.margin = options.margin;
  std::vector<Eigen::MatrixXcd> ops(static_cast<std::size_t>(n));

  for (int k = 0; k < n; ++k) ops[k] = proj[k].a1;
  rep.p_a = expect_local_product(state, ops).real();
  for (int k = 0; k < n; ++k) ops[k] = proj[k].b0;
  rep.p_bbar = expect_local_product(state, ops).real();
  rep.p_cross.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) ops[j] = j == k ? proj[j].b1 : proj[j].a1;
    rep.p_cross[k] = expect_local_product(state, ops).real();
  }
  rep.value = rep.p_a - rep.p_bbar - std::accumulate(rep.p_cross.begin(), rep.p_cross.end(), 0.0);

  // Frame parts: rank-one products.
  ProductVector pa, pbb;
  for (const auto& p : settings.parties) {
    pa.factors.push_back(p.a);
    pbb.factors.push_back(p.bbar);
  }
  const double sa = std::norm(inner_product(state, pa));
  const double sbb = std::norm(inner_product(state, pbb));
  double scross_total = 0.0;
  rep.leakage.cross_loss.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ProductVector mixed = pa;
    mixed[k] = settings.parties[k].b;
    const double sc = std::norm(inner_product(state, mixed));
    scross_total += sc;
    rep.leakage.cross_loss[k] = std::max(0.0, rep.p_cross[k] - sc);
  }
  rep.subspace_value = sa - sbb - scross_total;
  rep.leakage.a_gain = std::max(0.0, rep.p_a - sa);
  rep.leakage.bbar_loss = std::max(0.0, rep.p_bbar - sbb);

  rep.lhv_bound = options.with_lhv ? static_cast<double>(classical_bound(n)) : 0.0;
  rep.violation = rep.value > rep.lhv_bound + rep.margin;
  return rep;
}

}  // namespace

HardyReport quantum_value(const PureState& state, const MeasurementSettings& settings,
                          const EvaluationOptions& options) {
  check_settings(state, settings);
  return evaluate(state, settings, options);
}

double closed_form_hardy(const MagicFrame& frame, const HardyPlan& plan) {
  if (plan.perturbed())
    throw Error(ErrorCode::invalid_argument, "closed form does not apply to a perturbed plan");
  const cplx hA = frame.h_A();
  const cplx hI = frame.h_I();
  const double ys = std::pow(plan.y, plan.s);
  const double num = std::norm(ys * hA * hI * (1.0 - plan.z));
  const double den = std::pow(1.0 + plan.y * plan.y, plan.s) * (std::norm(hI) + std::norm(ys * hA * plan.z));
  return num / den;
}

HardyFlags hardy_flags(const HardyReport& report, double tol) {
  HardyFlags f;
  f.bbar_zero = report.p_bbar <= tol;
  f.cross_zero = std::all_of(report.p_cross.begin(), report.p_cross.end(), [tol](double p) { return p <= tol; });
  f.a_positive = report.p_a > tol;
  return f;
}

Leakage leakage_report(const PureState& state, const MeasurementSettings& settings) {
  return quantum_value(state, settings, {.margin = 1e-9, .with_lhv = false}).leakage;
}

PolicySearchResult search_policy(const PureState& state, const MeasurementSettings& settings) {
  check_settings(state, settings);
  const int n = state.parties();
  PolicySearchResult out;
  const EvaluationOptions quiet{.margin = 1e-9, .with_lhv = false};
  out.default_report = evaluate(state, settings, quiet);

  auto apply = [&](std::size_t code) {
    MeasurementSettings s = settings;
    for (int k = 0; k < n; ++k) {
      const bool flip_a = (code >> (2 * k)) & 1u;
      const bool flip_b = (code >> (2 * k + 1)) & 1u;
      s.parties[k].policy_a = flip_a ? ComplementPolicy::to_outcome_1 : ComplementPolicy::to_outcome_0;
      s.parties[k].policy_b = flip_b ? ComplementPolicy::to_outcome_0 : ComplementPolicy::to_outcome_1;
    }
    return s;
  };

  const bool any_qudit = !state.all_qubits();
  const std::size_t combos = (any_qudit && n <= 8) ? (std::size_t{1} << (2 * n)) : 1;
  std::vector<double> values(combos);
  parallel_for(combos, [&](std::size_t code) { values[code] = evaluate(state, apply(code), quiet).value; });

  std::size_t best = 0;
  for (std::size_t code = 1; code < combos; ++code)
    if (values[code] > values[best] + 1e-15) best = code;

  const MeasurementSettings chosen = apply(best);
  out.combinations = combos;
  for (const auto& p : chosen.parties) {
    out.policy_a.push_back(p.policy_a);
    out.policy_b.push_back(p.policy_b);
  }
  out.report = evaluate(state, chosen, {});
  return out;
}

namespace {

struct BlochParams {
  std::array<double, 4> v{};  // a: (theta, phi), b: (theta, phi)
};

Coord2 from_angles(double theta, double phi) {
  return {cplx{std::cos(theta), 0.0}, std::polar(std::sin(theta), phi)};
}

BlochParams to_params(const PartySettings& p) {
  auto ang = [](const Coord2& c) {
    const double theta = std::atan2(std::abs(c[1]), std::abs(c[0]));
    const double phi = std::arg(c[1]) - std::arg(c[0]);
    return std::pair{theta, phi};
  };
  BlochParams bp;
  std::tie(bp.v[0], bp.v[1]) = ang(p.a_frame);
  std::tie(bp.v[2], bp.v[3]) = ang(p.b_frame);
  return bp;
}

PartySettings from_params(const PartySettings& base, const BlochParams& bp) {
  const Coord2 a = from_angles(bp.v[0], bp.v[1]);
  const Coord2 b = from_angles(bp.v[2], bp.v[3]);
  const Coord2 bbar{-std::conj(b[1]), std::conj(b[0])};
  PartySettings p = make_party(base.e0, base.e1, a, b, bbar);
  p.policy_a = base.policy_a;
  p.policy_b = base.policy_b;
  return p;
}

}  // namespace

AscentResult maximize_violation(const PureState& state, const MeasurementSettings& start,
                                const AscentConfig& config) {
  check_settings(state, start);
  const int n = state.parties();
  const EvaluationOptions quiet{.margin = 1e-9, .with_lhv = false};
  AscentResult out;
  out.settings = start;
  double current = evaluate(state, out.settings, quiet).value;
  out.trace.push_back(current);

  std::mt19937_64 rng(splitmix64(config.seed + 99));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const double sweep_start = current;
    for (int k = 0; k < n; ++k) {
      MeasurementSettings trial = out.settings;
      auto objective = [&](const BlochParams& bp) {
        trial.parties[k] = from_params(out.settings.parties[k], bp);
        return evaluate(state, trial, quiet).value;
      };
      auto compass = [&](BlochParams bp) {
        double best = objective(bp);
        double step = 0.25;
        int evals = 0;
        while (step > 1e-7 && evals < 4000) {
          bool improved = false;
          for (int i = 0; i < 4; ++i)
            for (double dir : {1.0, -1.0}) {
              BlochParams cand = bp;
              cand.v[i] += dir * step;
              const double val = objective(cand);
              ++evals;
              if (val > best + 1e-15) {
                best = val;
                bp = cand;
                improved = true;
              }
            }
          if (!improved) step *= 0.5;
        }
        return std::pair{best, bp};
      };

      std::vector<BlochParams> starts{to_params(out.settings.parties[k])};
      for (int r = 0; r < config.restarts; ++r) {
        BlochParams bp;
        for (auto& x : bp.v) x = angle(rng);
        starts.push_back(bp);
      }
      double best_val = current;
      std::optional<BlochParams> best_params;
      for (const auto& s : starts) {
        const auto [val, bp] = compass(s);
        if (val > best_val) {
          best_val = val;
          best_params = bp;
        }
      }
      if (best_params) {
        out.settings.parties[k] = from_params(out.settings.parties[k], *best_params);
        current = best_val;
        out.settings.closed_form_stale = true;
      }
      out.trace.push_back(current);
    }
    if (current - sweep_start < config.tol) break;
  }
  return out;
}

}  // namespace hardyforge
