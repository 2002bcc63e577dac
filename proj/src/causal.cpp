#include "fairaudit/causal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <set>

namespace fairaudit {

const char* to_string(CFAggregate a) {
    return a == CFAggregate::mean ? "mean" : "max";
}

const CausalNode* CausalGraph::find(const std::string& name) const {
    for (const auto& n : nodes)
        if (n.name == name) return &n;
    return nullptr;
}

std::vector<std::string> CausalGraph::parents_of(const std::string& name) const {
    std::vector<std::string> out;
    for (const auto& [p, c] : edges)
        if (c == name) out.push_back(p);
    return out;
}

const EquationTerm* StructuralEquation::term_for(const std::string& parent) const {
    for (const auto& t : terms)
        if (t.parent == parent) return &t;
    return nullptr;
}

namespace {

std::optional<double> parse_numeric(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

// Kahn topological sort over all nodes; declaration order breaks ties.
std::vector<std::string> topo_all(const CausalGraph& g) {
    std::map<std::string, int> indeg;
    for (const auto& n : g.nodes) indeg[n.name] = 0;
    for (const auto& [p, c] : g.edges) indeg[c]++;

    std::vector<std::string> order;
    std::set<std::string> done;
    while (order.size() < g.nodes.size()) {
        bool progressed = false;
        for (const auto& n : g.nodes) {
            if (done.count(n.name) || indeg[n.name] != 0) continue;
            order.push_back(n.name);
            done.insert(n.name);
            for (const auto& [p, c] : g.edges)
                if (p == n.name) indeg[c]--;
            progressed = true;
        }
        if (!progressed) throw AuditError("CycleDetected", "causal graph contains a cycle");
    }
    return order;
}

}  // namespace

void validate_graph(const CausalGraph& g) {
    std::set<std::string> names;
    for (const auto& n : g.nodes) {
        if (n.name.empty()) throw AuditError("InvalidGraph", "node with empty name");
        if (!names.insert(n.name).second)
            throw AuditError("InvalidGraph", "duplicate node '" + n.name + "'");
    }
    for (const auto& [p, c] : g.edges) {
        if (!g.find(p)) throw AuditError("UnknownNode", "edge parent '" + p + "' not declared");
        if (!g.find(c)) throw AuditError("UnknownNode", "edge child '" + c + "' not declared");
        if (p == c) throw AuditError("CycleDetected", "self-loop on '" + p + "'");
    }

    const CausalNode* sens = g.find(g.sensitive_node);
    if (!sens) throw AuditError("UnknownNode", "sensitive node '" + g.sensitive_node + "' not declared");
    if (sens->kind != NodeKind::observed)
        throw AuditError("InvalidGraph", "sensitive node must be observed");
    const CausalNode* out = g.find(g.output_node);
    if (!out) throw AuditError("UnknownNode", "output node '" + g.output_node + "' not declared");
    if (out->kind != NodeKind::observed)
        throw AuditError("InvalidGraph", "output node must be observed");

    topo_all(g);  // throws CycleDetected

    for (const auto& n : g.nodes) {
        const auto parents = g.parents_of(n.name);
        if (n.kind == NodeKind::latent && !parents.empty())
            throw AuditError("LatentWithParents", "latent node '" + n.name + "' has parents");
        if (n.kind == NodeKind::observed && !parents.empty()) {
            int latent_parents = 0;
            for (const auto& p : parents)
                if (g.find(p)->kind == NodeKind::latent) ++latent_parents;
            if (latent_parents != 1)
                throw AuditError("Unidentifiable",
                                 "observed node '" + n.name + "' has " +
                                     std::to_string(latent_parents) +
                                     " latent parents; exactly 1 required");
        }
    }
}

std::vector<std::string> topological_observed(const CausalGraph& g) {
    std::vector<std::string> out;
    for (const auto& name : topo_all(g))
        if (g.find(name)->kind == NodeKind::observed) out.push_back(name);
    return out;
}

std::vector<std::string> sensitive_descendants(const CausalGraph& g) {
    std::set<std::string> reach{g.sensitive_node};
    std::deque<std::string> queue{g.sensitive_node};
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        for (const auto& [p, c] : g.edges) {
            if (p == cur && !reach.count(c)) {
                reach.insert(c);
                queue.push_back(c);
            }
        }
    }
    std::vector<std::string> out;
    for (const auto& name : topo_all(g))
        if (reach.count(name) && g.find(name)->kind == NodeKind::observed) out.push_back(name);
    return out;
}

namespace {

// Non-root observed nodes in topological order, with parents split by kind.
struct EquationShape {
    std::string child;
    std::vector<std::string> observed_parents;
    std::string latent_parent;
};

std::vector<EquationShape> equation_shapes(const CausalGraph& g) {
    std::vector<EquationShape> shapes;
    for (const auto& child : topological_observed(g)) {
        const auto parents = g.parents_of(child);
        if (parents.empty()) continue;
        EquationShape s;
        s.child = child;
        for (const auto& p : parents) {
            if (g.find(p)->kind == NodeKind::latent)
                s.latent_parent = p;
            else
                s.observed_parents.push_back(p);
        }
        shapes.push_back(std::move(s));
    }
    return shapes;
}

}  // namespace

FittedSCM scm_from_coefficients(const CausalGraph& g, const CoefficientMap& coeffs) {
    validate_graph(g);
    FittedSCM scm;
    scm.graph = g;
    for (const auto& shape : equation_shapes(g)) {
        auto it = coeffs.find(shape.child);
        if (it == coeffs.end())
            throw AuditError("InvalidGraph", "no coefficients declared for '" + shape.child + "'");
        const auto& by_parent = it->second;
        const auto all_parents = g.parents_of(shape.child);
        if (by_parent.size() != all_parents.size())
            throw AuditError("InvalidGraph",
                             "coefficients for '" + shape.child + "' must cover exactly its parents");
        StructuralEquation eq;
        eq.child = shape.child;
        for (const auto& p : all_parents) {
            auto ct = by_parent.find(p);
            if (ct == by_parent.end())
                throw AuditError("InvalidGraph",
                                 "missing coefficient for parent '" + p + "' of '" + shape.child + "'");
            if (!std::isfinite(ct->second))
                throw AuditError("InvalidGraph", "non-finite coefficient on '" + shape.child + "'");
            eq.terms.push_back({p, ct->second});
        }
        scm.equations.push_back(std::move(eq));
        scm.residual_sums[shape.child] = 0.0;
    }
    return scm;
}

FittedSCM fit_scm(const CausalGraph& g, const Dataset& ds) {
    validate_graph(g);
    require_binary_sensitive(ds.schema);
    {
        bool seen[2] = {false, false};
        for (const auto& rec : ds.records)
            seen[rec.sensitive == ds.schema.sensitive_values[0] ? 0 : 1] = true;
        if (!(seen[0] && seen[1]))
            throw AuditError("OneGroupOnly", "fitting requires records from both sensitive groups");
    }

    const auto n = static_cast<Eigen::Index>(ds.records.size());
    auto column = [&](const std::string& node) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = observed_node_value(ds.schema, ds.records[static_cast<std::size_t>(i)], node);
        return v;
    };

    FittedSCM scm;
    scm.graph = g;
    for (const auto& shape : equation_shapes(g)) {
        const auto p = static_cast<Eigen::Index>(shape.observed_parents.size());
        if (n < p + 1)
            throw AuditError("InvalidArgument",
                             "equation for '" + shape.child + "' needs at least " +
                                 std::to_string(p + 1) + " records");

        const Eigen::VectorXd y = column(shape.child);
        Eigen::VectorXd coef(p);
        Eigen::VectorXd residual = y;
        if (p > 0) {
            Eigen::MatrixXd X(n, p);
            for (Eigen::Index j = 0; j < p; ++j) {
                const Eigen::VectorXd col = column(shape.observed_parents[static_cast<std::size_t>(j)]);
                if (col.maxCoeff() == col.minCoeff())
                    throw AuditError("RankDeficient",
                                     "parent '" + shape.observed_parents[static_cast<std::size_t>(j)] +
                                         "' of '" + shape.child +
                                         "' is constant; coefficient not identifiable");
                X.col(j) = col;
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            qr.setThreshold(1e-10);
            if (qr.rank() < p)
                throw AuditError("RankDeficient",
                                 "collinear observed parents in equation for '" + shape.child + "'");
            coef = qr.solve(y);
            residual = y - X * coef;
        }

        StructuralEquation eq;
        eq.child = shape.child;
        for (const auto& parent : g.parents_of(shape.child)) {
            if (parent == shape.latent_parent) {
                eq.terms.push_back({parent, 1.0});
            } else {
                const auto idx = std::find(shape.observed_parents.begin(),
                                           shape.observed_parents.end(), parent) -
                                 shape.observed_parents.begin();
                eq.terms.push_back({parent, coef(static_cast<Eigen::Index>(idx))});
            }
        }
        scm.equations.push_back(std::move(eq));
        scm.residual_sums[shape.child] = residual.squaredNorm();
    }
    return scm;
}

double observed_node_value(const Schema& schema, const DecisionRecord& rec,
                           const std::string& node) {
    if (node == schema.sensitive_attr) {
        auto v = parse_numeric(rec.sensitive);
        if (!v)
            throw AuditError("BadValue", "sensitive value '" + rec.sensitive +
                                             "' is not numeric; SCM nodes need numeric values");
        return *v;
    }
    if (const FeatureDef* def = schema.find_feature(node)) {
        if (def->kind == FeatureKind::categorical)
            throw AuditError("BadValue", "categorical feature '" + node + "' cannot be an SCM node");
        return std::get<double>(rec.features.at(node));
    }
    if (schema.score_col && node == *schema.score_col) {
        if (!rec.score) throw AuditError("MissingScore", "record has no score for node '" + node + "'");
        return *rec.score;
    }
    if (node == schema.predicted_col) return static_cast<double>(rec.predicted);
    throw AuditError("UnknownNode", "node '" + node + "' matches no dataset column");
}

LatentAssignment abduct(const FittedSCM& scm, const Schema& schema, const DecisionRecord& rec) {
    LatentAssignment out;
    for (const auto& eq : scm.equations) {
        double acc = 0.0;
        const EquationTerm* latent_term = nullptr;
        for (const auto& t : eq.terms) {
            if (scm.graph.find(t.parent)->kind == NodeKind::latent) {
                latent_term = &t;
            } else {
                acc += t.coef * observed_node_value(schema, rec, t.parent);
            }
        }
        if (latent_term->coef == 0.0)
            throw AuditError("ZeroLatentCoefficient",
                             "latent coefficient for '" + eq.child + "' is zero");
        out.values[latent_term->parent] =
            (observed_node_value(schema, rec, eq.child) - acc) / latent_term->coef;
    }
    return out;
}

CounterfactualOutcome intervene_predict(const FittedSCM& scm, const Schema& schema,
                                        const LatentAssignment& latents,
                                        const DecisionRecord& rec,
                                        const std::string& new_sensitive_value) {
    auto nv = parse_numeric(new_sensitive_value);
    if (!nv)
        throw AuditError("BadValue",
                         "new sensitive value '" + new_sensitive_value + "' is not numeric");

    CounterfactualOutcome out;
    for (const auto& node : topological_observed(scm.graph))
        out.values[node] = observed_node_value(schema, rec, node);

    const auto desc = sensitive_descendants(scm.graph);
    std::set<std::string> descendants(desc.begin(), desc.end());
    out.values[scm.graph.sensitive_node] = *nv;
    for (const auto& eq : scm.equations) {
        if (!descendants.count(eq.child) || eq.child == scm.graph.sensitive_node) continue;
        double acc = 0.0;
        for (const auto& t : eq.terms) {
            if (scm.graph.find(t.parent)->kind == NodeKind::latent)
                acc += t.coef * latents.values.at(t.parent);
            else
                acc += t.coef * out.values.at(t.parent);
        }
        out.values[eq.child] = acc;
    }
    out.output = out.values.at(scm.graph.output_node);
    return out;
}

CFResult counterfactual_fairness_audit(const FittedSCM& scm, const Dataset& ds, double tau,
                                       CFAggregate aggregate) {
    if (!(tau >= 0.0)) throw AuditError("InvalidArgument", "tau must be >= 0");
    require_binary_sensitive(ds.schema);

    CFResult res;
    res.tau = tau;
    res.aggregate = aggregate;
    double sum = 0.0;
    for (const auto& rec : ds.records) {
        const LatentAssignment latents = abduct(scm, ds.schema, rec);
        const std::string& flipped = rec.sensitive == ds.schema.sensitive_values[0]
                                         ? ds.schema.sensitive_values[1]
                                         : ds.schema.sensitive_values[0];
        const CounterfactualOutcome cf = intervene_predict(scm, ds.schema, latents, rec, flipped);
        CFRecordOutcome o;
        o.actual = observed_node_value(ds.schema, rec, scm.graph.output_node);
        o.counterfactual = cf.output;
        o.delta = std::abs(o.actual - o.counterfactual);
        sum += o.delta;
        res.max_delta = std::max(res.max_delta, o.delta);
        res.per_record.push_back(o);
    }
    if (res.per_record.empty()) {
        res.verdict = Verdict::undefined;
        return res;
    }
    res.mean_delta = sum / static_cast<double>(res.per_record.size());
    const double agg = aggregate == CFAggregate::mean ? res.mean_delta : res.max_delta;
    res.verdict = agg <= tau ? Verdict::pass : Verdict::fail;
    return res;
}

}  // namespace fairaudit
