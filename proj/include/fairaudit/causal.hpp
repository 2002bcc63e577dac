#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/group_metrics.hpp"

namespace fairaudit {

enum class NodeKind { observed, latent };

struct CausalNode {
    std::string name;
    NodeKind kind = NodeKind::observed;
};

// DAG over observed and latent variables. Latent nodes are roots by
// construction; the sensitive and output nodes are observed.
struct CausalGraph {
    std::vector<CausalNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;  // parent -> child
    std::string sensitive_node;
    std::string output_node;

    const CausalNode* find(const std::string& name) const;
    std::vector<std::string> parents_of(const std::string& name) const;
};

// Confirms the graph invariants plus the v1 identifiability restriction:
// every observed non-root node has exactly one latent parent, which makes
// abduction an exact deterministic solve.
void validate_graph(const CausalGraph& g);

// Observed nodes of the graph in a deterministic topological order
// (declaration order among ties). validate_graph must hold.
std::vector<std::string> topological_observed(const CausalGraph& g);

// Observed descendants of the sensitive node, including itself.
std::vector<std::string> sensitive_descendants(const CausalGraph& g);

struct EquationTerm {
    std::string parent;
    double coef = 0.0;
};

// Linear structural equation: child = sum(coef * parent) over all graph
// parents (observed and latent).
struct StructuralEquation {
    std::string child;
    std::vector<EquationTerm> terms;

    const EquationTerm* term_for(const std::string& parent) const;
};

struct FittedSCM {
    CausalGraph graph;
    std::vector<StructuralEquation> equations;       // one per non-root observed node
    std::map<std::string, double> residual_sums;     // per-equation sum of squared residuals
};

// child -> (parent -> coefficient), e.g. from a graph file's coefficient
// section.
using CoefficientMap = std::map<std::string, std::map<std::string, double>>;

// Builds an SCM from declared coefficients; every non-root observed node
// needs a complete term list matching its graph parents.
FittedSCM scm_from_coefficients(const CausalGraph& g, const CoefficientMap& coeffs);

// Fits observed-parent coefficients per equation by least squares on the
// observed columns; the latent parent's contribution is the residual with its
// coefficient fixed to 1. Deterministic; requires records from both sensitive
// groups.
FittedSCM fit_scm(const CausalGraph& g, const Dataset& ds);

// Resolves a graph node to its numeric value in a record: the sensitive
// attribute (numeric-encoded), a numeric feature, the score column, or the
// predicted column.
double observed_node_value(const Schema& schema, const DecisionRecord& rec,
                           const std::string& node);

struct LatentAssignment {
    std::map<std::string, double> values;
};

// Solves the latents exactly, equation by equation:
// latent = (child - sum of observed-parent contributions) / latent coefficient.
LatentAssignment abduct(const FittedSCM& scm, const Schema& schema, const DecisionRecord& rec);

struct CounterfactualOutcome {
    std::map<std::string, double> values;  // all observed nodes
    double output = 0.0;                   // value at the output node
};

// Sets the sensitive node to new_sensitive_value (one of the schema's
// sensitive values, numeric-encoded) and recomputes its descendants in
// topological order with the held latents; non-descendants are unchanged.
CounterfactualOutcome intervene_predict(const FittedSCM& scm, const Schema& schema,
                                        const LatentAssignment& latents,
                                        const DecisionRecord& rec,
                                        const std::string& new_sensitive_value);

enum class CFAggregate { mean, max };

const char* to_string(CFAggregate a);

struct CFRecordOutcome {
    double actual = 0.0;
    double counterfactual = 0.0;
    double delta = 0.0;  // |actual - counterfactual|
};

struct CFResult {
    std::vector<CFRecordOutcome> per_record;
    double mean_delta = 0.0;
    double max_delta = 0.0;
    double tau = 0.0;
    CFAggregate aggregate = CFAggregate::max;
    Verdict verdict = Verdict::undefined;
};

// Abduct, flip the sensitive value, predict; pass iff the chosen aggregate of
// |actual - counterfactual| stays within tau.
CFResult counterfactual_fairness_audit(const FittedSCM& scm, const Dataset& ds, double tau,
                                       CFAggregate aggregate);

}  // namespace fairaudit
