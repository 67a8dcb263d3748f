#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardyforge/hardy_evaluator.hpp"
#include "hardyforge/magic_structure.hpp"
#include "hardyforge/product_optimizer.hpp"
#include "hardyforge/serialization.hpp"
#include "hardyforge/settings_synthesis.hpp"

namespace hardyforge {

struct PipelineOptions {
  std::uint64_t seed = 0;
  int restarts = 0;  // optimizer restarts, 0 selects 16 + 8n
  double tol = 1e-12;
  double margin = 1e-9;
  bool policy_search = false;
  int max_n = 13;  // largest n for which the LHV bound is enumerated
  double eps_c = 1e-9;
};

// Everything the construction produced, up to but excluding evaluation.
struct Construction {
  ClosestProductResult closest;
  EntanglementVerdict verdict;
  std::optional<MagicFrame> frame;
  MeasurementSettings settings;
  std::optional<GammaChoice> gamma;
  RepairResult repair;
  std::optional<PolicySearchResult> policy;
};

// Optimizer -> frame -> synthesis -> embedding -> repair (-> policy search).
// Throws not_entangled or construction_failed.
Construction construct(const PureState& state, const PipelineOptions& options = {});

// Same, starting from a given frame (no optimizer run).
Construction construct_from_frame(const MagicFrame& frame, const PipelineOptions& options = {});

struct Evaluation {
  HardyReport report;
  bool nondegenerate = false;
  bool pass = false;
  std::string lhv_source;  // "enumeration" or "analytic"
};

Evaluation evaluate_settings(const PureState& state, const MeasurementSettings& settings,
                             const PipelineOptions& options, const MagicFrame* frame = nullptr);

enum class Verdict { pass = 0, malformed = 1, not_entangled = 2, construction_failed = 3 };

struct CertifyOutcome {
  Verdict verdict = Verdict::construction_failed;
  json certificate;
  std::optional<Construction> construction;
  std::optional<Evaluation> evaluation;
  int exit_code() const { return static_cast<int>(verdict); }
};

// The timestamp is excluded from "certificate_hash".
CertifyOutcome certify(const PureState& state, const PipelineOptions& options = {},
                       double input_norm = 1.0);

// Hash of the state amplitudes and dims.
std::string state_hash(const PureState& state);

struct ExampleRow {
  std::string quantity;
  std::string expected;
  double computed = 0.0;
  bool ok = false;
};

struct ExampleReport {
  std::string name;
  std::vector<ExampleRow> rows;
  bool pass() const;
  json to_json() const;
  std::string table() const;
};

// Named states: w3, ghz3, ghz-n (n >= 3), mixed5.
PureState example_state(const std::string& name, int n = 4);
ExampleReport run_example(const std::string& name, int n = 4, const PipelineOptions& options = {});

struct BatchSummary {
  std::vector<int> dims;
  int count = 0;
  int entangled = 0;
  int passed = 0;
  int bell = 0;
  int hardy = 0;
  double min_value = 0.0;
  double median_value = 0.0;
  double max_leakage = 0.0;
  std::vector<std::string> failures;
  json to_json() const;
};

BatchSummary random_batch(const std::vector<int>& dims, std::uint64_t seed, int count,
                          const PipelineOptions& options = {});

}  // namespace hardyforge
