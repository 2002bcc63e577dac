#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairaudit/causal.hpp"
#include "fairaudit/dataset.hpp"

namespace fairaudit {

// Deterministic fixtures for the worked hiring examples; acceptance tests and
// demo inputs are generated from these.
enum class Scenario {
    fig2_independence,
    fig3_separation,
    fig4_sufficiency,
    gpa_conditional,
    bob_counterfactual,
};

struct ScenarioSpec {
    Scenario name = Scenario::fig2_independence;
    long seed = 0;  // reserved for randomized padding; the named counts are fixed
};

struct GeneratedScenario {
    Dataset dataset;
    std::optional<CausalGraph> graph;          // bob_counterfactual only
    std::optional<CoefficientMap> coefficients;
};

GeneratedScenario generate(const ScenarioSpec& spec);

Scenario scenario_from_name(const std::string& name);  // throws UnknownScenario
const char* to_string(Scenario s);
std::vector<std::string> scenario_names();

}  // namespace fairaudit
