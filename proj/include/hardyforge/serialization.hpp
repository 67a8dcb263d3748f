#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hardyforge/hardy_evaluator.hpp"
#include "hardyforge/lhv_oracle.hpp"
#include "hardyforge/magic_structure.hpp"
#include "hardyforge/settings.hpp"
#include "hardyforge/statekit.hpp"

namespace hardyforge {

using json = nlohmann::ordered_json;

// Complex numbers travel as [re, im]; vectors as arrays of those.
json to_json(cplx c);
json to_json(const CVec& v);
cplx cplx_from_json(const json& j);
CVec cvec_from_json(const json& j);

struct LoadedState {
  PureState state;
  double input_norm = 1.0;  // norm before normalization
};

// {"dims": [...], "amps": [[re, im], ...]}; the reader normalizes.
LoadedState state_from_json(const json& j);
json state_to_json(const PureState& state);
LoadedState read_state_file(const std::string& path);

// Party sets are written 1-based.
json mask_to_json(SubsetMask mask, int n);

json frame_to_json(const MagicFrame& frame);
json settings_to_json(const MeasurementSettings& settings);
json report_to_json(const HardyReport& report);

// Vectors are taken as given; the local frame comes from the optional
// "frame" entry or, if absent, from span{b, bbar}.
MeasurementSettings settings_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);
// Hash of the compact dump of j.
std::string json_hash(const json& j);

}  // namespace hardyforge
