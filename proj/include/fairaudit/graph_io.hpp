#pragma once

#include <optional>
#include <utility>

#include "json.hpp"

#include "fairaudit/causal.hpp"

namespace fairaudit {

// Causal-graph file format: a JSON document with a node list (name + kind),
// an edge list, sensitive/output node names and an optional coefficient
// section. Comments (// and /* */) are tolerated on parse.
//
// {
//   "nodes": [ {"name": "A", "kind": "observed"}, {"name": "K", "kind": "latent"}, ... ],
//   "edges": [ ["A", "GPA"], ["K", "GPA"], ... ],
//   "sensitive": "A",
//   "output": "Y",
//   "coefficients": { "GPA": {"A": 0.2, "K": 0.8}, ... }   // optional
// }

struct GraphFile {
    CausalGraph graph;
    std::optional<CoefficientMap> coefficients;
};

GraphFile graph_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json graph_to_json(const CausalGraph& g,
                                     const CoefficientMap* coefficients = nullptr);

// Fitted coefficients exported in the same format, for reproducibility.
nlohmann::ordered_json scm_to_json(const FittedSCM& scm);

GraphFile load_graph_file(const std::string& path);

}  // namespace fairaudit
