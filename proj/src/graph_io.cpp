#include "fairaudit/graph_io.hpp"

#include <fstream>
#include <sstream>

namespace fairaudit {

using json = nlohmann::ordered_json;

GraphFile graph_from_json(const json& j) {
    GraphFile out;
    try {
        for (const auto& n : j.at("nodes")) {
            CausalNode node;
            node.name = n.at("name").get<std::string>();
            const std::string kind = n.at("kind").get<std::string>();
            if (kind == "observed")
                node.kind = NodeKind::observed;
            else if (kind == "latent")
                node.kind = NodeKind::latent;
            else
                throw AuditError("InvalidGraph", "node kind must be observed or latent");
            out.graph.nodes.push_back(std::move(node));
        }
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw AuditError("InvalidGraph", "each edge must be a [parent, child] pair");
            out.graph.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
        out.graph.sensitive_node = j.at("sensitive").get<std::string>();
        out.graph.output_node = j.at("output").get<std::string>();
        if (j.contains("coefficients")) {
            CoefficientMap coeffs;
            for (const auto& [child, terms] : j.at("coefficients").items()) {
                for (const auto& [parent, coef] : terms.items())
                    coeffs[child][parent] = coef.get<double>();
            }
            out.coefficients = std::move(coeffs);
        }
    } catch (const json::exception& e) {
        throw AuditError("InvalidGraph", std::string("malformed graph file: ") + e.what());
    }
    validate_graph(out.graph);
    return out;
}

json graph_to_json(const CausalGraph& g, const CoefficientMap* coefficients) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : g.nodes)
        j["nodes"].push_back({{"name", n.name},
                              {"kind", n.kind == NodeKind::observed ? "observed" : "latent"}});
    j["edges"] = json::array();
    for (const auto& [p, c] : g.edges) j["edges"].push_back({p, c});
    j["sensitive"] = g.sensitive_node;
    j["output"] = g.output_node;
    if (coefficients) {
        json coeffs;
        for (const auto& [child, terms] : *coefficients) {
            json t;
            for (const auto& [parent, coef] : terms) t[parent] = coef;
            coeffs[child] = std::move(t);
        }
        j["coefficients"] = std::move(coeffs);
    }
    return j;
}

json scm_to_json(const FittedSCM& scm) {
    CoefficientMap coeffs;
    for (const auto& eq : scm.equations)
        for (const auto& t : eq.terms) coeffs[eq.child][t.parent] = t.coef;
    json j = graph_to_json(scm.graph, &coeffs);
    if (!scm.residual_sums.empty()) {
        json r;
        for (const auto& [child, ssr] : scm.residual_sums) r[child] = ssr;
        j["residual_sums"] = std::move(r);
    }
    return j;
}

GraphFile load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AuditError("InvalidGraph", "cannot open graph file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw AuditError("InvalidGraph", "graph file '" + path + "' is not valid JSON: " + e.what());
    }
    return graph_from_json(j);
}

}  // namespace fairaudit
