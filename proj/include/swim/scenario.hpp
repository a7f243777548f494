#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "swim/model.hpp"
#include "swim/trace_io.hpp"

namespace swim {

/// Model tuning for one of the reference data sets.
struct ScenarioPreset {
  std::string name;
  ModelParams params;
  DatasetMeta meta;
};

/// infocom05, cambridge05 and cambridge06, in that order.
std::span<const ScenarioPreset> presets();

/// Throws ParameterError naming the known presets.
const ScenarioPreset& find_preset(std::string_view name);

// Config files are flat "key = value" lines; '#' starts a comment. Keys are
// the ModelParams field names. Missing keys keep their defaults.

ModelParams read_config(std::istream& in, ModelParams base = {});
ModelParams load_config(const std::string& path, ModelParams base = {});
void write_config(const ModelParams& params, std::ostream& out);

/// Human-readable preset dump (config lines plus dataset comments).
void print_preset(const ScenarioPreset& preset, std::ostream& out);

}  // namespace swim
