#include "hardyforge/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hardyforge {

json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json to_json(const CVec& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(to_json(c));
  return out;
}

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::parse_error, "complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

CVec cvec_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "expected an array of [re, im] pairs");
  CVec out;
  out.reserve(j.size());
  for (const auto& c : j) out.push_back(cplx_from_json(c));
  return out;
}

LoadedState state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("amps"))
    throw Error(ErrorCode::parse_error, "state needs \"dims\" and \"amps\"");
  if (!j["dims"].is_array()) throw Error(ErrorCode::parse_error, "\"dims\" must be an array");
  std::vector<int> dims;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer()) throw Error(ErrorCode::parse_error, "dimensions must be integers");
    dims.push_back(d.get<int>());
  }
  CVec amps = cvec_from_json(j["amps"]);
  PureState raw(std::move(dims), std::move(amps));
  const double nrm = raw.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw Error(ErrorCode::invalid_argument, "state has zero or non-finite norm");
  return {raw.normalized(), nrm};
}

json state_to_json(const PureState& state) {
  json out;
  out["dims"] = state.dims();
  out["amps"] = to_json(state.amp_vector());
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

LoadedState read_state_file(const std::string& path) { return state_from_json(read_json_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
  out << text;
}

json mask_to_json(SubsetMask mask, int n) {
  json out = json::array();
  for (int k : mask.members(n)) out.push_back(k + 1);
  return out;
}

json frame_to_json(const MagicFrame& frame) {
  const int n = frame.parties();
  json out;
  out["m"] = frame.m;
  out["A"] = mask_to_json(frame.A, n);
  out["threshold"] = frame.threshold;
  json e0 = json::array(), e1 = json::array();
  for (int k = 0; k < n; ++k) {
    e0.push_back(to_json(frame.e0[k]));
    e1.push_back(to_json(frame.e1[k]));
  }
  out["e0"] = std::move(e0);
  out["e1"] = std::move(e1);
  json h = json::object();
  for (std::uint32_t mask = 0; mask < frame.h.size(); ++mask)
    if (std::abs(frame.h[mask]) > frame.threshold) h[std::to_string(mask)] = to_json(frame.h[mask]);
  out["h"] = std::move(h);
  json coll = json::array();
  for (SubsetMask a : frame.collection) coll.push_back(a.bits);
  out["collection"] = std::move(coll);
  return out;
}

namespace {

json coord_json(const Coord2& c) { return json::array({to_json(c[0]), to_json(c[1])}); }

ComplementPolicy policy_from_string(const std::string& s) {
  if (s == "complement-to-outcome-0") return ComplementPolicy::to_outcome_0;
  if (s == "complement-to-outcome-1") return ComplementPolicy::to_outcome_1;
  throw Error(ErrorCode::parse_error, "unknown complement policy \"" + s + "\"");
}

std::vector<double> perturbations(const MeasurementSettings& s) {
  if (s.hardy) return s.hardy->x;
  if (s.bell) return s.bell->x;
  return {};
}

}  // namespace

json settings_to_json(const MeasurementSettings& settings) {
  const int n = settings.size();
  json out;
  out["scenario"] = to_string(settings.scenario);
  out["A"] = mask_to_json(settings.A, n);
  out["A_mask"] = settings.A.bits;
  out["closed_form_stale"] = settings.closed_form_stale;

  json plan = json::object();
  if (settings.bell) {
    const BellPlan& b = *settings.bell;
    plan["gamma"] = b.gamma;
    plan["lambda"] = b.lambda;
    plan["theta"] = b.theta;
    plan["q"] = b.q;
    plan["r"] = to_json(b.r);
  }
  if (settings.hardy) {
    const HardyPlan& h = *settings.hardy;
    plan["v"] = h.v + 1;
    plan["S"] = mask_to_json(h.S, n);
    plan["s"] = h.s;
    plan["y"] = h.y;
    plan["z"] = to_json(h.z);
    json c = json::object();
    for (const auto& [k, ck] : h.c) c[std::to_string(k + 1)] = to_json(ck);
    plan["c"] = std::move(c);
    plan["e"] = to_json(h.e);
    plan["f"] = to_json(h.f);
  }
  plan["perturbations"] = perturbations(settings);
  out["plan"] = std::move(plan);

  json parties = json::array();
  for (const auto& p : settings.parties) {
    json jp;
    jp["a"] = to_json(p.a);
    jp["b"] = to_json(p.b);
    jp["bbar"] = to_json(p.bbar);
    jp["policy_a"] = to_string(p.policy_a);
    jp["policy_b"] = to_string(p.policy_b);
    jp["frame"] = {{"e0", to_json(p.e0)},
                   {"e1", to_json(p.e1)},
                   {"a", coord_json(p.a_frame)},
                   {"b", coord_json(p.b_frame)},
                   {"bbar", coord_json(p.bbar_frame)}};
    parties.push_back(std::move(jp));
  }
  out["parties"] = std::move(parties);
  return out;
}

MeasurementSettings settings_from_json(const json& j) {
  if (!j.is_object() || !j.contains("parties") || !j["parties"].is_array())
    throw Error(ErrorCode::parse_error, "settings need a \"parties\" array");
  MeasurementSettings out;
  try {
    if (j.contains("scenario")) {
      const std::string s = j["scenario"].get<std::string>();
      if (s == "Bell")
        out.scenario = Scenario::bell;
      else if (s == "Hardy")
        out.scenario = Scenario::hardy;
      else
        throw Error(ErrorCode::parse_error, "unknown scenario \"" + s + "\"");
    }
    if (j.contains("A_mask")) out.A = SubsetMask(j["A_mask"].get<std::uint32_t>());
    out.closed_form_stale = j.value("closed_form_stale", false);

    for (const auto& jp : j["parties"]) {
      PartySettings p;
      p.a = cvec_from_json(jp.at("a"));
      p.b = cvec_from_json(jp.at("b"));
      p.bbar = cvec_from_json(jp.at("bbar"));
      if (p.a.size() < 2 || p.b.size() != p.a.size() || p.bbar.size() != p.a.size())
        throw Error(ErrorCode::dimension_mismatch, "party vectors must share one dimension >= 2");
      p.policy_a = policy_from_string(jp.value("policy_a", std::string("complement-to-outcome-0")));
      p.policy_b = policy_from_string(jp.value("policy_b", std::string("complement-to-outcome-1")));
      if (jp.contains("frame")) {
        p.e0 = cvec_from_json(jp["frame"].at("e0"));
        p.e1 = cvec_from_json(jp["frame"].at("e1"));
        if (p.e0.size() != p.a.size() || p.e1.size() != p.a.size())
          throw Error(ErrorCode::dimension_mismatch, "frame vectors must match the party dimension");
      } else {
        p.e0 = p.b;
        p.e1 = p.bbar;
      }
      auto coords = [&](const CVec& v) { return Coord2{vdot(p.e0, v), vdot(p.e1, v)}; };
      p.a_frame = coords(p.a);
      p.b_frame = coords(p.b);
      p.bbar_frame = coords(p.bbar);
      out.parties.push_back(std::move(p));
    }

    const int n = out.size();
    if (j.contains("plan") && j["plan"].is_object()) {
      const json& plan = j["plan"];
      std::vector<double> x;
      if (plan.contains("perturbations")) x = plan["perturbations"].get<std::vector<double>>();
      if (plan.contains("gamma")) {
        BellPlan b;
        b.gamma = plan["gamma"].get<double>();
        b.lambda = plan.value("lambda", 0.0);
        b.theta = plan.value("theta", 0.0);
        b.q = plan.value("q", 0.0);
        if (plan.contains("r")) b.r = cplx_from_json(plan["r"]);
        b.x = x;
        out.bell = b;
      }
      if (plan.contains("y")) {
        HardyPlan h;
        h.v = plan.at("v").get<int>() - 1;
        h.S = out.A.complement(n).without(h.v);
        h.s = plan.value("s", 0);
        h.y = plan["y"].get<double>();
        h.z = cplx_from_json(plan.at("z"));
        if (plan.contains("c"))
          for (const auto& [key, val] : plan["c"].items()) h.c[std::stoi(key) - 1] = cplx_from_json(val);
        if (plan.contains("e")) h.e = cplx_from_json(plan["e"]);
        if (plan.contains("f")) h.f = cplx_from_json(plan["f"]);
        h.x = x;
        out.hardy = h;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("settings: ") + e.what());
  }
  return out;
}

json report_to_json(const HardyReport& r) {
  json out;
  out["p_a"] = r.p_a;
  out["p_bbar"] = r.p_bbar;
  out["p_cross"] = r.p_cross;
  out["value"] = r.value;
  out["subspace_value"] = r.subspace_value;
  out["leakage"] = {{"a_gain", r.leakage.a_gain},
                    {"bbar_loss", r.leakage.bbar_loss},
                    {"cross_loss", r.leakage.cross_loss},
                    {"total_loss", r.leakage.total_loss()}};
  out["closed_form"] = r.closed_form ? json(*r.closed_form) : json(nullptr);
  out["lhv_bound"] = r.lhv_bound;
  out["margin"] = r.margin;
  out["violation"] = r.violation;
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string json_hash(const json& j) { return hex64(fnv1a64(j.dump())); }

}  // namespace hardyforge
