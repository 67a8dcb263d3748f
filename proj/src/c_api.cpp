#include "hardyforge/hardyforge.h"

#include <cstring>
#include <string>

#include "hardyforge/lhv_oracle.hpp"
#include "hardyforge/pipeline.hpp"

struct hf_state {
  hardyforge::PureState state;
  double input_norm = 1.0;
};

namespace {

using namespace hardyforge;

thread_local std::string last_error;

hf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return HF_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return HF_ERR_DIMENSION;
    case ErrorCode::parse_error: return HF_ERR_PARSE;
    case ErrorCode::not_entangled: return HF_ERR_NOT_ENTANGLED;
    case ErrorCode::construction_failed: return HF_ERR_CONSTRUCTION;
    case ErrorCode::out_of_range: return HF_ERR_RANGE;
    case ErrorCode::non_orthonormal: return HF_ERR_NON_ORTHONORMAL;
  }
  return HF_ERR_INTERNAL;
}

template <class F>
hf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return HF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return HF_ERR_PARSE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HF_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

PipelineOptions to_options(const hf_options* o) {
  PipelineOptions p;
  if (!o) return p;
  p.seed = o->seed;
  p.restarts = o->restarts;
  p.tol = o->tol;
  p.margin = o->margin;
  p.policy_search = o->policy_search != 0;
  p.max_n = o->max_n;
  return p;
}

}  // namespace

extern "C" {

const char* hf_version(void) { return kToolVersion; }

const char* hf_last_error(void) { return last_error.c_str(); }

void hf_options_default(hf_options* options) {
  if (!options) return;
  const PipelineOptions d;
  options->seed = d.seed;
  options->restarts = d.restarts;
  options->tol = d.tol;
  options->margin = d.margin;
  options->policy_search = d.policy_search ? 1 : 0;
  options->max_n = d.max_n;
}

hf_status hf_state_from_json(const char* text, hf_state** out) {
  return guarded([&] {
    require(text && out, "null argument");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error, e.what());
    }
    LoadedState ls = state_from_json(j);
    *out = new hf_state{std::move(ls.state), ls.input_norm};
  });
}

hf_status hf_state_load(const char* path, hf_state** out) {
  return guarded([&] {
    require(path && out, "null argument");
    LoadedState ls = read_state_file(path);
    *out = new hf_state{std::move(ls.state), ls.input_norm};
  });
}

hf_status hf_state_haar(const int* dims, size_t n, uint64_t seed, hf_state** out) {
  return guarded([&] {
    require(dims && out, "null argument");
    *out = new hf_state{haar_random_state(std::vector<int>(dims, dims + n), seed), 1.0};
  });
}

hf_status hf_state_to_json(const hf_state* state, char** out) {
  return guarded([&] {
    require(state && out, "null argument");
    *out = dup_string(state_to_json(state->state).dump());
  });
}

int hf_state_parties(const hf_state* state) { return state ? state->state.parties() : 0; }

double hf_state_input_norm(const hf_state* state) { return state ? state->input_norm : 0.0; }

void hf_state_free(hf_state* state) { delete state; }

void hf_string_free(char* s) { delete[] s; }

hf_status hf_certify(const hf_state* state, const hf_options* options, char** certificate_json, int* exit_code) {
  return guarded([&] {
    require(state && certificate_json && exit_code, "null argument");
    const CertifyOutcome outcome = certify(state->state, to_options(options), state->input_norm);
    *certificate_json = dup_string(outcome.certificate.dump(2));
    *exit_code = outcome.exit_code();
  });
}

hf_status hf_construct(const hf_state* state, const hf_options* options, char** settings_json) {
  return guarded([&] {
    require(state && settings_json, "null argument");
    const Construction c = construct(state->state, to_options(options));
    json out = settings_to_json(c.settings);
    out["frame_export"] = frame_to_json(*c.frame);
    out["Lambda"] = c.closest.overlap;
    *settings_json = dup_string(out.dump(2));
  });
}

hf_status hf_evaluate(const hf_state* state, const char* settings_text, const hf_options* options,
                      char** report_json, int* violation) {
  return guarded([&] {
    require(state && settings_text && report_json && violation, "null argument");
    json sj;
    try {
      sj = json::parse(settings_text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error, e.what());
    }
    const MeasurementSettings settings = settings_from_json(sj);
    const Evaluation ev = evaluate_settings(state->state, settings, to_options(options));
    json out = report_to_json(ev.report);
    out["nondegenerate"] = ev.nondegenerate;
    out["degeneracy"] = degeneracy_metrics(settings);
    out["lhv_source"] = ev.lhv_source;
    out["settings_hash"] = json_hash(sj);
    out["frame_hash"] = sj.contains("frame_export") ? json_hash(sj["frame_export"]) : std::string();
    out["state_hash"] = state_hash(state->state);
    out["tool_version"] = kToolVersion;
    *report_json = dup_string(out.dump(2));
    *violation = ev.report.violation ? 1 : 0;
  });
}

hf_status hf_lhv(int n, char** summary_json) {
  return guarded([&] {
    require(summary_json != nullptr, "null argument");
    const ClassicalMax cm = classical_max(n);
    json samples = json::array();
    for (const auto& a : cm.sample_maximizers) {
      std::string bits_a, bits_b;
      for (int k = 0; k < n; ++k) {
        bits_a += a.a(k) ? '1' : '0';
        bits_b += a.b(k) ? '1' : '0';
      }
      samples.push_back({{"a", bits_a}, {"b", bits_b}});
    }
    json out = {{"n", n},
                {"assignments", cm.assignments},
                {"max_value", cm.max_value},
                {"maximizer_count", cm.maximizer_count},
                {"sample_maximizers", samples},
                {"contextual_impossibility", contextual_impossibility(n)}};
    *summary_json = dup_string(out.dump(2));
  });
}

hf_status hf_example(const char* name, int n, const hf_options* options, char** report_json, char** table,
                     int* pass) {
  return guarded([&] {
    require(name && report_json && pass, "null argument");
    const ExampleReport rep = run_example(name, n, to_options(options));
    *report_json = dup_string(rep.to_json().dump(2));
    if (table) *table = dup_string(rep.table());
    *pass = rep.pass() ? 1 : 0;
  });
}

hf_status hf_random_batch(const int* dims, size_t n, uint64_t seed, int count, const hf_options* options,
                          char** summary_json) {
  return guarded([&] {
    require(dims && summary_json, "null argument");
    const BatchSummary s = random_batch(std::vector<int>(dims, dims + n), seed, count, to_options(options));
    *summary_json = dup_string(s.to_json().dump(2));
  });
}

}  // extern "C"
