#include "hardyforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "hardyforge/lhv_oracle.hpp"
#include "hardyforge/parallel.hpp"

namespace hardyforge {

namespace {

void synthesize(const MagicFrame& frame, const PipelineOptions& options, Construction& c) {
  const int n = frame.parties();
  MeasurementSettings settings;
  if (frame.m == n - 2) {
    c.gamma = choose_gamma(frame);
    settings = plan_bell(frame, c.gamma->gamma).second;
  } else {
    SynthesisConfig sc;
    sc.seed = options.seed;
    settings = plan_hardy(frame, sc).second;
  }
  settings = embed_qudit(settings, frame);
  c.repair = degeneracy_fix(settings, frame);
  settings = c.repair.settings;
  if (options.policy_search && !frame.source.all_qubits() && n <= 8) {
    c.policy = search_policy(frame.source, settings);
    for (int k = 0; k < n; ++k) {
      settings.parties[k].policy_a = c.policy->policy_a[k];
      settings.parties[k].policy_b = c.policy->policy_b[k];
    }
  }
  c.settings = std::move(settings);
}

MagicFrame checked_frame(const PureState& state, const ProductVector& pv, const PipelineOptions& options) {
  MagicFrame frame = magic_frame(state, pv, {.eps_c = options.eps_c, .als_restarts = 8, .seed = options.seed});
  const auto issues = validate_magic_frame(frame, 1e-8, options.seed);
  if (!issues.empty()) {
    std::string msg = "magic frame failed validation";
    for (const auto& i : issues) msg += "; " + i;
    throw Error(ErrorCode::construction_failed, msg);
  }
  return frame;
}

OptimizerConfig optimizer_config(const PipelineOptions& options) {
  OptimizerConfig oc;
  oc.restarts = options.restarts;
  oc.tol = options.tol;
  oc.seed = options.seed;
  return oc;
}

}  // namespace

Construction construct(const PureState& state, const PipelineOptions& options) {
  Construction c;
  c.closest = closest_product(state, optimizer_config(options));
  c.verdict = is_entangled(state, c.closest, 1e-9, options.eps_c);
  if (!c.verdict.entangled) throw Error(ErrorCode::not_entangled, "state is not entangled: " + c.verdict.certificate);
  c.frame = checked_frame(state, c.closest.pv, options);
  synthesize(*c.frame, options, c);
  return c;
}

Construction construct_from_frame(const MagicFrame& frame, const PipelineOptions& options) {
  Construction c;
  c.frame = frame;
  c.verdict.entangled = true;
  c.verdict.collection_nonempty = !frame.collection.empty();
  c.verdict.overlap = std::abs(frame.h_I());
  synthesize(frame, options, c);
  return c;
}

Evaluation evaluate_settings(const PureState& state, const MeasurementSettings& settings,
                             const PipelineOptions& options, const MagicFrame* frame) {
  Evaluation ev;
  ev.report = quantum_value(state, settings, {.margin = options.margin, .with_lhv = false});
  const int n = state.parties();
  if (n <= std::min(options.max_n, 13)) {
    ev.report.lhv_bound = classical_bound(n);
    ev.lhv_source = "enumeration";
  } else {
    ev.report.lhv_bound = 0.0;
    ev.lhv_source = "analytic";
  }
  ev.report.violation = ev.report.value > ev.report.lhv_bound + ev.report.margin;
  if (frame && !settings.closed_form_stale) {
    if (settings.scenario == Scenario::bell && settings.bell && frame->m == n - 2)
      ev.report.closed_form = bell_value(*frame, settings.bell->gamma);
    else if (settings.scenario == Scenario::hardy && settings.hardy)
      ev.report.closed_form = closed_form_hardy(*frame, *settings.hardy);
  }
  ev.nondegenerate = nondegenerate(settings);
  ev.pass = ev.report.violation && ev.nondegenerate;
  return ev;
}

std::string state_hash(const PureState& state) { return json_hash(state_to_json(state)); }

namespace {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json frame_summary(const MagicFrame& frame, double overlap) {
  const int n = frame.parties();
  return {{"m", frame.m},
          {"A", mask_to_json(frame.A, n)},
          {"Lambda", overlap},
          {"eps_c", frame.threshold},
          {"collection_size", frame.collection.size()},
          {"h_I", to_json(frame.h_I())},
          {"h_A", to_json(frame.h_A())},
          {"frame_hash", json_hash(frame_to_json(frame))}};
}

}  // namespace

CertifyOutcome certify(const PureState& state, const PipelineOptions& options, double input_norm) {
  CertifyOutcome out;
  json& cert = out.certificate;
  cert["tool_version"] = kToolVersion;
  cert["seed"] = options.seed;
  cert["state_hash"] = state_hash(state);
  cert["dims"] = state.dims();
  cert["input_norm"] = input_norm;
  cert["options"] = {{"restarts", options.restarts},
                     {"tol", options.tol},
                     {"margin", options.margin},
                     {"policy_search", options.policy_search},
                     {"max_n", options.max_n},
                     {"eps_c", options.eps_c}};

  Construction c;
  try {
    c.closest = closest_product(state, optimizer_config(options));
    cert["closest_product"] = {
        {"overlap", c.closest.overlap},
        {"restarts", c.closest.restarts_used},
        {"certified", c.closest.certified},
        {"max_residual", *std::max_element(c.closest.residuals.begin(), c.closest.residuals.end())}};
    c.verdict = is_entangled(state, c.closest, 1e-9, options.eps_c);
    cert["entangled"] = c.verdict.entangled;
    if (!c.verdict.entangled) {
      out.verdict = Verdict::not_entangled;
      cert["frame"] = {{"Lambda", c.closest.overlap}, {"collection_size", 0}};
      cert["diagnostics"] = "not entangled: " + c.verdict.certificate;
    } else {
      c.frame = checked_frame(state, c.closest.pv, options);
      cert["frame"] = frame_summary(*c.frame, c.closest.overlap);
      synthesize(*c.frame, options, c);
      const Evaluation ev = evaluate_settings(state, c.settings, options, &*c.frame);
      cert["scenario"] = to_string(c.settings.scenario);
      cert["settings"] = settings_to_json(c.settings);
      cert["settings_hash"] = json_hash(cert["settings"]);
      cert["report"] = report_to_json(ev.report);
      cert["classical_bound"] = ev.report.lhv_bound;
      cert["lhv_source"] = ev.lhv_source;
      cert["degeneracy"] = degeneracy_metrics(c.settings);
      cert["nondegenerate"] = ev.nondegenerate;
      cert["repair"] = {{"changed", c.repair.changed}, {"x", c.repair.x}, {"halvings", c.repair.halvings}};
      if (c.policy) {
        json pa = json::array(), pb = json::array();
        for (auto p : c.policy->policy_a) pa.push_back(to_string(p));
        for (auto p : c.policy->policy_b) pb.push_back(to_string(p));
        cert["policy_search"] = {{"combinations", c.policy->combinations},
                                 {"policy_a", pa},
                                 {"policy_b", pb},
                                 {"default_value", c.policy->default_report.value},
                                 {"best_value", c.policy->report.value}};
      }
      out.verdict = ev.pass ? Verdict::pass : Verdict::construction_failed;
      if (!ev.pass)
        cert["diagnostics"] = ev.nondegenerate ? "value does not exceed the classical bound" : "settings degenerate";
      out.evaluation = ev;
    }
  } catch (const Error& e) {
    out.verdict = e.code() == ErrorCode::not_entangled ? Verdict::not_entangled : Verdict::construction_failed;
    cert["diagnostics"] = e.what();
  }
  out.construction = std::move(c);

  static const char* names[] = {"pass", "malformed input", "not entangled", "construction failure"};
  cert["pass"] = out.verdict == Verdict::pass;
  cert["verdict"] = names[static_cast<int>(out.verdict)];
  cert["exit_code"] = out.exit_code();
  cert["certificate_hash"] = json_hash(cert);
  cert["timestamp"] = utc_timestamp();
  return out;
}

// ---------------------------------------------------------------- examples

PureState example_state(const std::string& name, int n) {
  const double r3 = 1.0 / std::sqrt(3.0), r2 = 1.0 / std::sqrt(2.0);
  if (name == "w3") {
    CVec amps(8);
    amps[0b100] = amps[0b010] = amps[0b001] = r3;
    return PureState({2, 2, 2}, amps);
  }
  if (name == "ghz3" || name == "ghz-n") {
    const int parties = name == "ghz3" ? 3 : n;
    if (parties < 3 || parties > 20) throw Error(ErrorCode::invalid_argument, "ghz-n needs 3 <= n <= 20");
    CVec amps(std::size_t{1} << parties);
    amps.front() = amps.back() = r2;
    return PureState(std::vector<int>(static_cast<std::size_t>(parties), 2), amps);
  }
  if (name == "mixed5") {
    CVec amps(32);
    amps[0b00000] = amps[0b00111] = amps[0b11111] = r3;
    return PureState({2, 2, 2, 2, 2}, amps);
  }
  throw Error(ErrorCode::invalid_argument, "unknown example \"" + name + "\" (w3, ghz3, ghz-n, mixed5)");
}

bool ExampleReport::pass() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const ExampleRow& r) { return r.ok; });
}

json ExampleReport::to_json() const {
  json out;
  out["example"] = name;
  json rs = json::array();
  for (const auto& r : rows)
    rs.push_back({{"quantity", r.quantity}, {"expected", r.expected}, {"computed", r.computed}, {"ok", r.ok}});
  out["rows"] = std::move(rs);
  out["pass"] = pass();
  return out;
}

std::string ExampleReport::table() const {
  std::ostringstream os;
  os << name << "\n";
  os << std::left << std::setw(44) << "quantity" << std::setw(28) << "expected" << std::setw(26) << "computed"
     << "ok\n";
  for (const auto& r : rows)
    os << std::left << std::setw(44) << r.quantity << std::setw(28) << r.expected << std::setw(26)
       << std::setprecision(15) << r.computed << (r.ok ? "yes" : "NO") << "\n";
  return os.str();
}

namespace {

struct RowBuilder {
  std::vector<ExampleRow>& rows;

  void near(const std::string& what, double expected, const std::string& expected_text, double computed,
            double tol) {
    rows.push_back({what, expected_text, computed, std::abs(computed - expected) <= tol});
  }
  void above(const std::string& what, double bound, const std::string& expected_text, double computed) {
    rows.push_back({what, expected_text, computed, computed > bound});
  }
  void flag(const std::string& what, bool ok) { rows.push_back({what, "true", ok ? 1.0 : 0.0, ok}); }
};

std::vector<CVec> uniform(int n, int i) { return std::vector<CVec>(static_cast<std::size_t>(n), basis_vector(2, i)); }

double direct_value(const PureState& state, const MeasurementSettings& s) {
  return quantum_value(state, s, {.margin = 1e-9, .with_lhv = false}).value;
}

void ghz_rows(RowBuilder& rb, const PureState& state, double h_empty_sq, double h_full_sq, const std::string& tag,
              const PipelineOptions& options) {
  const int n = state.parties();
  const Construction c = construct(state, options);
  const MagicFrame& frame = *c.frame;
  rb.flag(tag + ": Hardy scenario", c.settings.scenario == Scenario::hardy);
  const HardyPlan& plan = *c.settings.hardy;
  rb.near(tag + ": y0", 1.0, "1", plan.y, 0.0);
  // z0 = -exp(i pi/(n-1)) (|h_empty|/|h_I|)^{2/(n-1)}, or its conjugate
  const double mod = std::pow(std::sqrt(h_empty_sq / h_full_sq), 2.0 / (n - 1));
  const cplx z_ref = -std::polar(mod, std::numbers::pi / (n - 1));
  const double dz = std::min(std::abs(plan.z - z_ref), std::abs(plan.z - std::conj(z_ref)));
  std::ostringstream zs;
  zs << "-e^{i pi/" << n - 1 << "} * " << std::setprecision(6) << mod << " (or conj)";
  rb.near(tag + ": |z0 - root formula|", 0.0, zs.str(), dz, 1e-9);
  const double closed = closed_form_hardy(frame, plan);
  const double value = direct_value(state, c.settings);
  rb.near(tag + ": closed form - direct value", 0.0, "0", closed - value, 1e-9);
  const double expected = h_empty_sq * h_full_sq * std::norm(1.0 - z_ref) /
                          (std::pow(2.0, n - 1) * (h_full_sq + h_empty_sq * std::norm(z_ref)));
  rb.near(tag + ": value", expected, std::to_string(expected), value, 1e-9);
}

}  // namespace

ExampleReport run_example(const std::string& name, int n, const PipelineOptions& options) {
  ExampleReport rep;
  rep.name = name;
  RowBuilder rb{rep.rows};
  const PureState state = example_state(name, n);

  if (name == "w3") {
    const Construction c = construct(state, options);
    const MagicFrame& f = *c.frame;
    rb.near("Lambda", 2.0 / 3.0, "2/3", c.closest.overlap, 1e-9);
    rb.near("|h_I|^2", 4.0 / 9.0, "4/9", std::norm(f.h_I()), 1e-9);
    rb.near("h_A", -1.0 / 3.0, "-1/3", f.h_A().real(), 1e-9);
    const BellPlan bp = bell_parameters(f, 0.0);
    rb.near("q", std::sqrt(2.0) / 3.0, "sqrt(2)/3", bp.q, 1e-12);
    rb.near("|r|", std::sqrt(7.0) / 3.0, "sqrt(7)/3", std::abs(bp.r), 1e-12);
    rb.near("value at gamma = 0 (closed form)", 4.0 / 81.0, "4/81", bell_value(f, 0.0), 1e-9);
    rb.near("value at gamma = 0 (direct)", 4.0 / 81.0, "4/81", direct_value(state, plan_bell(f, 0.0).second), 1e-9);
    rb.above("gamma*", 0.0, "> 0", c.gamma->gamma);
    rb.above("value at gamma* (direct)", 2.0 / 81.0, "> 2/81", direct_value(state, c.settings));
    rb.flag("settings nondegenerate", nondegenerate(c.settings));
  } else if (name == "ghz3") {
    ghz_rows(rb, state, 0.5, 0.5, "balanced", options);
    CVec amps(8);
    amps[0] = std::sqrt(0.8);
    amps[7] = std::sqrt(0.2);
    ghz_rows(rb, PureState({2, 2, 2}, amps), 0.2, 0.8, "weights 1/5, 4/5", options);
  } else if (name == "ghz-n") {
    ghz_rows(rb, state, 0.5, 0.5, "n = " + std::to_string(state.parties()), options);
  } else {
    // Hardy reading: computational frame, v = party 5, y = 1.
    const MagicFrame hf = frame_from_bases(state, uniform(5, 0), uniform(5, 1));
    rb.near("Hardy frame: m", 2, "2", hf.m, 0.0);
    SynthesisConfig sc;
    sc.fixed_v = 4;
    sc.fixed_y = 1.0;
    sc.seed = options.seed;
    const auto [plan, settings] = plan_hardy(hf, sc);
    double cmax = 0.0;
    for (const auto& [k, ck] : plan.c) cmax = std::max(cmax, std::abs(ck));
    rb.near("max |c_k|", 0.0, "0", cmax, 1e-12);
    rb.near("|f - 1|", 0.0, "0", std::abs(plan.f - 1.0), 1e-12);
    rb.near("|e + z|", 0.0, "0", std::abs(plan.e + plan.z), 1e-12);
    const Polynomial p = hardy_polynomial(hf, plan.S, plan.v, 1.0);
    rb.near("|P(i)| / scale", 0.0, "0 (z = i is a root)", std::abs(p(cplx{0.0, 1.0})) / p.scale, 1e-12);
    rb.near("Hardy value (closed form)", 1.0 / 12.0, "1/12", closed_form_hardy(hf, plan), 1e-9);
    rb.near("Hardy value (direct)", 1.0 / 12.0, "1/12", direct_value(state, settings), 1e-9);
    const RepairResult fixed = degeneracy_fix(settings, hf);
    rb.flag("repaired settings nondegenerate", nondegenerate(fixed.settings));
    const double repaired = direct_value(state, fixed.settings);
    rb.near("repaired Hardy value", 1.0 / 12.0, "within 10% of 1/12", repaired, 1.0 / 120.0);

    // Bell reading: the same state with |0> and |1> exchanged in every frame.
    const MagicFrame bf = frame_from_bases(state, uniform(5, 1), uniform(5, 0));
    rb.near("flipped frame: m", 3, "3 = n-2", bf.m, 0.0);
    rb.near("Bell value at gamma = 0 (closed form)", 1.0 / 12.0, "1/12", bell_value(bf, 0.0), 1e-9);
    rb.near("Bell value at gamma = 0 (direct)", 1.0 / 12.0, "1/12", direct_value(state, plan_bell(bf, 0.0).second),
            1e-9);
    const GammaChoice g = choose_gamma(bf);
    const MeasurementSettings bs = plan_bell(bf, g.gamma).second;
    rb.above("Bell value at gamma* (direct)", 1.0 / 24.0, "> 1/24", direct_value(state, bs));
    rb.flag("Bell settings nondegenerate", nondegenerate(bs));
  }
  return rep;
}

// ---------------------------------------------------------------- batches

json BatchSummary::to_json() const {
  return {{"dims", dims},         {"count", count},         {"entangled", entangled},
          {"passed", passed},     {"bell", bell},           {"hardy", hardy},
          {"min_value", min_value}, {"median_value", median_value}, {"max_leakage", max_leakage},
          {"failures", failures}};
}

BatchSummary random_batch(const std::vector<int>& dims, std::uint64_t seed, int count,
                          const PipelineOptions& options) {
  if (count < 0) throw Error(ErrorCode::invalid_argument, "count must be non-negative");
  BatchSummary sum;
  sum.dims = dims;
  sum.count = count;
  PureState(dims, CVec(total_size(dims)));  // validates dims

  struct Item {
    Verdict verdict = Verdict::construction_failed;
    Scenario scenario = Scenario::bell;
    double value = 0.0;
    double leakage = 0.0;
    std::string diagnostics;
  };
  std::vector<Item> items(static_cast<std::size_t>(count));
  const std::uint64_t base = splitmix64(seed);
  parallel_for(items.size(), [&](std::size_t i) {
    const PureState state = haar_random_state(dims, base + i);
    PipelineOptions o = options;
    o.seed = base + i;
    const CertifyOutcome outcome = certify(state, o);
    Item& it = items[i];
    it.verdict = outcome.verdict;
    if (outcome.evaluation) {
      it.value = outcome.evaluation->report.value;
      const Leakage& l = outcome.evaluation->report.leakage;
      it.leakage = l.a_gain + l.total_loss();
    }
    if (outcome.construction && outcome.construction->frame) it.scenario = outcome.construction->settings.scenario;
    if (outcome.certificate.contains("diagnostics")) it.diagnostics = outcome.certificate["diagnostics"];
  });

  std::vector<double> values;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    if (it.verdict == Verdict::not_entangled) continue;
    ++sum.entangled;
    if (it.verdict == Verdict::pass) {
      ++sum.passed;
      (it.scenario == Scenario::bell ? sum.bell : sum.hardy) += 1;
      values.push_back(it.value);
      sum.max_leakage = std::max(sum.max_leakage, it.leakage);
    } else {
      sum.failures.push_back("state " + std::to_string(i) + ": " + it.diagnostics);
    }
  }
  if (!values.empty()) {
    std::sort(values.begin(), values.end());
    sum.min_value = values.front();
    sum.median_value = values[values.size() / 2];
  }
  return sum;
}

}  // namespace hardyforge
