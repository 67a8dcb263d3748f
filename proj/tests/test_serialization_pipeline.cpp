#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hardyforge/parallel.hpp"
#include "hardyforge/pipeline.hpp"
#include "oracles.hpp"

using namespace hardyforge;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

const EvaluationOptions quiet{.margin = 1e-9, .with_lhv = false};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("state JSON round trip and normalization") {
  const json j = json::parse(R"({"dims": [2, 2], "amps": [[3, 0], 0, 0, [0, 4]]})");
  const LoadedState ls = state_from_json(j);
  CHECK(ls.input_norm == doctest::Approx(5.0));
  CHECK(std::abs(ls.state[0] - 0.6) < 1e-15);
  CHECK(std::abs(ls.state[3] - cplx(0.0, 0.8)) < 1e-15);

  const PureState s = haar_random_state({3, 2}, 8);
  const LoadedState back = state_from_json(json::parse(state_to_json(s).dump()));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back.state[i] == s[i]);
  CHECK(state_hash(back.state) == state_hash(s));
}

TEST_CASE("malformed states are rejected") {
  CHECK(code_of([] { state_from_json(json::parse(R"({"dims": [2, 2]})")); }) == ErrorCode::parse_error);
  CHECK(code_of([] { state_from_json(json::parse(R"({"dims": [2, 2], "amps": [1, 0, 0]})")); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([] { state_from_json(json::parse(R"({"dims": [2, 2], "amps": [0, 0, 0, 0]})")); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { state_from_json(json::parse(R"({"dims": [2, "x"], "amps": [1, 0]})")); }) ==
        ErrorCode::parse_error);
  CHECK(code_of([] { read_state_file("/nonexistent/state.json"); }) == ErrorCode::parse_error);
}

TEST_CASE("party sets are written 1-based") {
  CHECK(mask_to_json(SubsetMask(0b101), 3).dump() == "[1,3]");
  CHECK(mask_to_json(SubsetMask(), 3).dump() == "[]");
}

TEST_CASE("settings JSON round trip preserves the probabilities") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::vector<int> dims = seed % 2 ? std::vector<int>{3, 3} : std::vector<int>{2, 2, 2};
    const PureState s = haar_random_state(dims, 20 + seed);
    const Construction c = construct(s, {.seed = seed});
    const json j = json::parse(settings_to_json(c.settings).dump());
    const MeasurementSettings back = settings_from_json(j);
    CHECK(back.scenario == c.settings.scenario);
    CHECK(back.A == c.settings.A);
    const HardyReport r0 = quantum_value(s, c.settings, quiet), r1 = quantum_value(s, back, quiet);
    CHECK(std::abs(r0.value - r1.value) < 1e-14);
    CHECK(std::abs(r0.subspace_value - r1.subspace_value) < 1e-14);
    for (int k = 0; k < back.size(); ++k) {
      CHECK(back.parties[k].policy_a == c.settings.parties[k].policy_a);
      CHECK(back.parties[k].policy_b == c.settings.parties[k].policy_b);
    }
  }
}

TEST_CASE("settings without a frame entry take the frame from b and bbar") {
  const json j = json::parse(R"({"parties": [
      {"a": [[0.6, 0], [0.8, 0]], "b": [[1, 0], [0, 0]], "bbar": [[0, 0], [1, 0]]},
      {"a": [[0.6, 0], [0.8, 0]], "b": [[1, 0], [0, 0]], "bbar": [[0, 0], [1, 0]]}]})");
  const MeasurementSettings m = settings_from_json(j);
  REQUIRE(m.size() == 2);
  CHECK(std::abs(m.parties[0].a_frame[0] - 0.6) < 1e-15);
  CHECK(std::abs(m.parties[0].a_frame[1] - 0.8) < 1e-15);
  CHECK(m.parties[0].policy_b == ComplementPolicy::to_outcome_1);
  CHECK_THROWS_AS(settings_from_json(json::parse(R"({"parties": 3})")), Error);
}

TEST_CASE("certify: W state passes and the hash is reproducible") {
  const PureState w = example_state("w3");
  const CertifyOutcome a = certify(w), b = certify(w);
  CHECK(a.exit_code() == 0);
  CHECK(a.certificate["pass"].get<bool>());
  CHECK(a.certificate["scenario"] == "Bell");
  CHECK(a.certificate["certificate_hash"] == b.certificate["certificate_hash"]);
  CHECK(a.certificate["settings_hash"] == b.certificate["settings_hash"]);
  CHECK(a.certificate.contains("timestamp"));
  CHECK(a.certificate["report"]["value"].get<double>() > 2.0 / 81.0);
  CHECK(a.certificate["classical_bound"].get<double>() == 0.0);
  CHECK(a.certificate["lhv_source"] == "enumeration");
}

TEST_CASE("certify: product state exits 2") {
  const PureState p({2, 2}, {r2, r2, 0.0, 0.0});
  const CertifyOutcome o = certify(p);
  CHECK(o.exit_code() == 2);
  CHECK_FALSE(o.certificate["pass"].get<bool>());
  CHECK(o.certificate.contains("diagnostics"));
  CHECK_THROWS_AS(construct(p), Error);
}

TEST_CASE("certify: qudit state records the policy search") {
  const PipelineOptions opts{.policy_search = true};
  const CertifyOutcome o = certify(haar_random_state({3, 3}, 4), opts);
  CHECK(o.exit_code() == 0);
  REQUIRE(o.certificate.contains("policy_search"));
  CHECK(o.certificate["policy_search"]["combinations"] == 16);
  CHECK(o.certificate["report"].contains("leakage"));
}

TEST_CASE("LHV bound beyond max_n is taken analytically") {
  const PureState s = example_state("ghz-n", 5);
  const Construction c = construct(s);
  const Evaluation e = evaluate_settings(s, c.settings, {.max_n = 4}, &*c.frame);
  CHECK(e.lhv_source == "analytic");
  CHECK(e.report.lhv_bound == 0.0);
  const Evaluation f = evaluate_settings(s, c.settings, {}, &*c.frame);
  CHECK(f.lhv_source == "enumeration");
  REQUIRE(f.report.closed_form);
  CHECK(std::abs(*f.report.closed_form - f.report.value) < 1e-9);
}

TEST_CASE("worked examples reproduce") {
  for (const char* name : {"w3", "ghz3", "mixed5"}) {
    const ExampleReport r = run_example(name);
    CHECK_MESSAGE(r.pass(), r.table());
  }
  CHECK(run_example("ghz-n", 6).pass());
  CHECK_THROWS_AS(example_state("nope"), Error);
}

TEST_CASE("random batch is reproducible and passes") {
  const BatchSummary a = random_batch({2, 2, 2}, 3, 12), b = random_batch({2, 2, 2}, 3, 12);
  CHECK(a.failures.empty());
  CHECK(a.passed == a.entangled);
  CHECK(a.min_value == b.min_value);
  CHECK(a.median_value == b.median_value);
}

TEST_CASE("construct_from_frame follows the frame's scenario") {
  const PureState s = example_state("mixed5");
  const auto e0 = std::vector<CVec>(5, basis_vector(2, 0)), e1 = std::vector<CVec>(5, basis_vector(2, 1));
  const Construction c = construct_from_frame(frame_from_bases(s, e0, e1));
  CHECK(c.settings.scenario == Scenario::hardy);
  CHECK(nondegenerate(c.settings));
  CHECK(quantum_value(s, c.settings, quiet).value > 0.0);
  const Construction d = construct_from_frame(frame_from_bases(s, e1, e0));
  CHECK(d.settings.scenario == Scenario::bell);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK(worker_count() >= 1);
}
