// Exercises the shared library through its C header only.
#include <doctest.h>
#include <json.hpp>

#include <cstring>
#include <string>

#include "hardyforge/hardyforge.h"

namespace {

using nlohmann::json;

struct Owned {
  char* s = nullptr;
  ~Owned() { hf_string_free(s); }
  json parse() const { return json::parse(s); }
};

struct State {
  hf_state* p = nullptr;
  ~State() { hf_state_free(p); }
};

const char* kW3 = R"({"dims": [2, 2, 2], "amps": [0, [1, 0], [1, 0], 0, [1, 0], 0, 0, 0]})";

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(hf_version()) > 0);
  hf_options o;
  hf_options_default(&o);
  CHECK(o.max_n == 13);
  CHECK(o.tol == 1e-12);
  CHECK(o.margin == 1e-9);
  CHECK(o.policy_search == 0);
}

TEST_CASE("state handles") {
  State st;
  REQUIRE(hf_state_from_json(kW3, &st.p) == HF_OK);
  CHECK(hf_state_parties(st.p) == 3);
  CHECK(hf_state_input_norm(st.p) == doctest::Approx(std::sqrt(3.0)));
  Owned text;
  REQUIRE(hf_state_to_json(st.p, &text.s) == HF_OK);
  CHECK(text.parse()["dims"].size() == 3);

  State bad;
  CHECK(hf_state_from_json("{not json", &bad.p) == HF_ERR_PARSE);
  CHECK(std::strlen(hf_last_error()) > 0);
  CHECK(bad.p == nullptr);
  CHECK(hf_state_from_json(R"({"dims": [2, 2], "amps": [1, 0]})", &bad.p) == HF_ERR_DIMENSION);
  CHECK(hf_state_from_json(nullptr, &bad.p) == HF_ERR_INVALID_ARGUMENT);
  CHECK(hf_state_load("/nonexistent.json", &bad.p) == HF_ERR_PARSE);
}

TEST_CASE("certify, construct and evaluate round trip") {
  State st;
  REQUIRE(hf_state_from_json(kW3, &st.p) == HF_OK);
  hf_options o;
  hf_options_default(&o);

  Owned cert;
  int code = -1;
  REQUIRE(hf_certify(st.p, &o, &cert.s, &code) == HF_OK);
  CHECK(code == 0);
  CHECK(cert.parse()["pass"].get<bool>());

  Owned settings;
  REQUIRE(hf_construct(st.p, &o, &settings.s) == HF_OK);
  CHECK(settings.parse()["Lambda"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  Owned report;
  int violation = 0;
  REQUIRE(hf_evaluate(st.p, settings.s, &o, &report.s, &violation) == HF_OK);
  CHECK(violation == 1);
  const json r = report.parse();
  CHECK(r["nondegenerate"].get<bool>());
  CHECK(r["value"].get<double>() > 2.0 / 81.0);

  Owned junk;
  CHECK(hf_evaluate(st.p, "[]", &o, &junk.s, &violation) == HF_ERR_PARSE);
}

TEST_CASE("product state reports not entangled") {
  State st;
  REQUIRE(hf_state_from_json(R"({"dims": [2, 2], "amps": [1, 0, 0, 0]})", &st.p) == HF_OK);
  Owned cert;
  int code = -1;
  REQUIRE(hf_certify(st.p, nullptr, &cert.s, &code) == HF_OK);
  CHECK(code == 2);
  Owned settings;
  CHECK(hf_construct(st.p, nullptr, &settings.s) == HF_ERR_NOT_ENTANGLED);
}

TEST_CASE("lhv, examples and batches") {
  Owned lhv;
  REQUIRE(hf_lhv(4, &lhv.s) == HF_OK);
  const json l = lhv.parse();
  CHECK(l["max_value"] == 0);
  CHECK(l["contextual_impossibility"].get<bool>());
  Owned none;
  CHECK(hf_lhv(14, &none.s) == HF_ERR_RANGE);

  Owned ex, table;
  int pass = 0;
  REQUIRE(hf_example("ghz3", 4, nullptr, &ex.s, &table.s, &pass) == HF_OK);
  CHECK(pass == 1);
  CHECK(std::string(table.s).find("ghz3") != std::string::npos);
  Owned bad;
  CHECK(hf_example("nope", 4, nullptr, &bad.s, nullptr, &pass) == HF_ERR_INVALID_ARGUMENT);

  const int dims[] = {2, 2};
  Owned batch;
  REQUIRE(hf_random_batch(dims, 2, 1, 5, nullptr, &batch.s) == HF_OK);
  CHECK(batch.parse()["failures"].empty());

  State haar;
  REQUIRE(hf_state_haar(dims, 2, 9, &haar.p) == HF_OK);
  CHECK(hf_state_parties(haar.p) == 2);
}
