#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ulab/checks.hpp"
#include "ulab/convergence.hpp"
#include "ulab/estimators.hpp"
#include "ulab/models.hpp"
#include "ulab/test_function.hpp"

namespace ulab {

/// Command-line overrides applied on top of a scenario file.
struct ScenarioOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  unsigned threads = 1;
};

struct ScenarioBundle {
  std::string name;
  std::string description;
  std::string expected;
  std::string observed;
  bool passed = false;
  std::vector<CheckReport> reports;
  std::optional<ConvergenceTable> convergence;
  nlohmann::json extra = nlohmann::json::object();
};

/// Names of the scenario files shipped in the scenarios directory.
std::vector<std::string> scenario_names();

/// A shipped scenario by name, or a JSON file path.
nlohmann::json load_scenario(const std::string& name_or_file);

/**
 * Runs a scenario description. "kind" selects fwuldp, dzuldp, luldp, ulp,
 * eulp, dz-sweep, hausdorff or control-conv; see the shipped files for fields.
 * @throws ConfigError on malformed descriptions.
 */
ScenarioBundle run_scenario(const nlohmann::json& config, const ScenarioOptions& options = {});

nlohmann::json to_json(const ScenarioBundle& bundle);

/**
 * {"line": {"start": a, "slope": b}}, {"constant": a}, {"csv": file} or
 * {"skeleton": {"control": [c...]}} from the point @p x.
 */
DiscretePath path_from_json(const nlohmann::json& spec, const ProcessModel& model, const Point& x = {});

/// Event grammar keyed by "type"; see scenarios/README.md.
EventSpec event_from_json(const nlohmann::json& spec, const ProcessModel& model);

/// Test function grammar keyed by "type"; paths may depend on the index point @p x.
TestFunction test_function_from_json(const nlohmann::json& spec, const ProcessModel& model, const Point& x = {});

/// {"family": "constant", "values": [...]} or {"family": "lower"|"upper", "j", "delta", "s", "count", "seed"}.
EquicontinuousFamily family_from_json(const nlohmann::json& spec, const ProcessModel& model,
                                      const IndexSetSample& a);

IndexSetSample index_set_from_json(const nlohmann::json& spec, std::size_t dim = 1);
EpsilonSchedule schedule_from_json(const nlohmann::json& spec);
CheckBudget budget_from_json(const nlohmann::json& spec, const ScenarioOptions& options = {});

}  // namespace ulab
