#include "fairaudit/config.hpp"

#include <fstream>
#include <sstream>

#include "fairaudit/graph_io.hpp"

namespace fairaudit {

using json = ordered_json;

namespace {

FeatureKind kind_from_string(const std::string& s) {
    if (s == "numeric") return FeatureKind::numeric;
    if (s == "categorical") return FeatureKind::categorical;
    if (s == "binary") return FeatureKind::binary;
    throw AuditError("InvalidConfig", "unknown feature kind '" + s + "'");
}

const char* kind_to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::numeric: return "numeric";
        case FeatureKind::categorical: return "categorical";
        case FeatureKind::binary: return "binary";
    }
    return "?";
}

Tolerance tolerance_from(const json& j) {
    Tolerance t;
    if (j.contains("epsilon")) t.epsilon = j.at("epsilon").get<double>();
    if (j.contains("min_cell")) t.min_cell = j.at("min_cell").get<std::int64_t>();
    t.validate();
    return t;
}

}  // namespace

AuditConfig config_from_json(const json& j) {
    AuditConfig cfg;
    try {
        const json& s = j.at("schema");
        if (s.contains("features")) {
            for (const auto& f : s.at("features"))
                cfg.schema.features.push_back(
                    {f.at("name").get<std::string>(), kind_from_string(f.at("kind").get<std::string>())});
        }
        const json& sens = s.at("sensitive");
        cfg.schema.sensitive_attr = sens.at("name").get<std::string>();
        for (const auto& v : sens.at("values"))
            cfg.schema.sensitive_values.push_back(v.get<std::string>());
        cfg.schema.predicted_col = s.at("predicted").get<std::string>();
        if (s.contains("target")) cfg.schema.target_col = s.at("target").get<std::string>();
        if (s.contains("score")) cfg.schema.score_col = s.at("score").get<std::string>();
        if (s.contains("positive_label"))
            cfg.schema.positive_label = s.at("positive_label").get<std::string>();
        if (s.contains("negative_label"))
            cfg.schema.negative_label = s.at("negative_label").get<std::string>();
        cfg.schema.validate();

        const json measures = j.contains("measures") ? j.at("measures") : json::object();
        auto enabled = [](const json& m) { return m.contains("enabled") && m.at("enabled").get<bool>(); };

        if (measures.contains("independence")) {
            const json& m = measures.at("independence");
            cfg.independence.enabled = enabled(m);
            cfg.independence.tol = tolerance_from(m);
        }
        if (measures.contains("conditional_independence")) {
            const json& m = measures.at("conditional_independence");
            cfg.conditional_independence.enabled = enabled(m);
            cfg.conditional_independence.tol = tolerance_from(m);
            if (m.contains("conditions"))
                for (const auto& c : m.at("conditions"))
                    cfg.conditional_independence.conditions.push_back(c.get<std::string>());
            if (m.contains("binning")) {
                const json& b = m.at("binning");
                BinningSpec& spec = cfg.conditional_independence.binning;
                const std::string strat = b.at("strategy").get<std::string>();
                if (strat == "explicit_edges") spec.strategy = BinningStrategy::explicit_edges;
                else if (strat == "quantile") spec.strategy = BinningStrategy::quantile;
                else if (strat == "equal_width") spec.strategy = BinningStrategy::equal_width;
                else throw AuditError("InvalidConfig", "unknown binning strategy '" + strat + "'");
                if (b.contains("k")) spec.k = b.at("k").get<int>();
                if (b.contains("edges"))
                    for (const auto& e : b.at("edges")) spec.edges.push_back(e.get<double>());
                spec.validate();
            }
        }
        if (measures.contains("separation")) {
            const json& m = measures.at("separation");
            cfg.separation.enabled = enabled(m);
            cfg.separation.tol = tolerance_from(m);
        }
        if (measures.contains("sufficiency")) {
            const json& m = measures.at("sufficiency");
            cfg.sufficiency.enabled = enabled(m);
            cfg.sufficiency.tol = tolerance_from(m);
        }
        if (measures.contains("negative_dominance")) {
            const json& m = measures.at("negative_dominance");
            cfg.negative_dominance.enabled = enabled(m);
            if (m.contains("protected_value"))
                cfg.negative_dominance.protected_value = m.at("protected_value").get<std::string>();
        }
        if (measures.contains("individual")) {
            const json& m = measures.at("individual");
            cfg.individual.enabled = enabled(m);
            DistanceConfig& d = cfg.individual.distance;
            if (m.contains("lipschitz")) d.lipschitz = m.at("lipschitz").get<double>();
            if (m.contains("output_mode")) {
                const std::string mode = m.at("output_mode").get<std::string>();
                if (mode == "label") d.output_mode = OutputMode::label;
                else if (mode == "score") d.output_mode = OutputMode::score;
                else throw AuditError("InvalidConfig", "unknown output mode '" + mode + "'");
            }
            if (m.contains("scaling")) {
                const std::string sc = m.at("scaling").get<std::string>();
                if (sc == "minmax") d.numeric_scaling = NumericScaling::minmax;
                else if (sc == "zscore") d.numeric_scaling = NumericScaling::zscore;
                else throw AuditError("InvalidConfig", "unknown scaling '" + sc + "'");
            }
            if (m.contains("weights"))
                for (const auto& [name, w] : m.at("weights").items())
                    d.feature_weights[name] = w.get<double>();
            if (m.contains("include_sensitive"))
                d.include_sensitive = m.at("include_sensitive").get<bool>();
            d.validate();
        }
        if (measures.contains("counterfactual")) {
            const json& m = measures.at("counterfactual");
            cfg.counterfactual.enabled = enabled(m);
            if (m.contains("graph")) cfg.counterfactual.graph_path = m.at("graph").get<std::string>();
            if (m.contains("tau")) cfg.counterfactual.tau = m.at("tau").get<double>();
            if (m.contains("aggregate")) {
                const std::string agg = m.at("aggregate").get<std::string>();
                if (agg == "mean") cfg.counterfactual.aggregate = CFAggregate::mean;
                else if (agg == "max") cfg.counterfactual.aggregate = CFAggregate::max;
                else throw AuditError("InvalidConfig", "unknown aggregate '" + agg + "'");
            }
        }
        if (measures.contains("proxy_scan")) {
            const json& m = measures.at("proxy_scan");
            cfg.proxy_scan.enabled = enabled(m);
            if (m.contains("threshold")) cfg.proxy_scan.threshold = m.at("threshold").get<double>();
        }

        if (j.contains("output")) {
            const json& o = j.at("output");
            if (o.contains("report")) cfg.report_path = o.at("report").get<std::string>();
            if (o.contains("summary")) cfg.summary_path = o.at("summary").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw AuditError("InvalidConfig", std::string("malformed config: ") + e.what());
    }

    if (cfg.negative_dominance.enabled && cfg.negative_dominance.protected_value.empty())
        throw AuditError("InvalidConfig", "negative_dominance needs protected_value");
    if (cfg.counterfactual.enabled && cfg.counterfactual.graph_path.empty())
        throw AuditError("InvalidConfig", "counterfactual needs a graph file path");
    return cfg;
}

AuditConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AuditError("InvalidConfig", "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw AuditError("InvalidConfig", "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

ordered_json AuditConfig::snapshot() const {
    json j;
    json s;
    s["features"] = json::array();
    for (const auto& f : schema.features)
        s["features"].push_back({{"name", f.name}, {"kind", kind_to_string(f.kind)}});
    s["sensitive"] = {{"name", schema.sensitive_attr}, {"values", schema.sensitive_values}};
    s["predicted"] = schema.predicted_col;
    if (schema.target_col) s["target"] = *schema.target_col;
    if (schema.score_col) s["score"] = *schema.score_col;
    s["positive_label"] = schema.positive_label;
    s["negative_label"] = schema.negative_label;
    j["schema"] = std::move(s);

    json m;
    auto tol_json = [](const Tolerance& t) {
        return json{{"epsilon", t.epsilon}, {"min_cell", t.min_cell}};
    };
    if (independence.enabled) {
        m["independence"] = tol_json(independence.tol);
    }
    if (conditional_independence.enabled) {
        json c = tol_json(conditional_independence.tol);
        c["conditions"] = conditional_independence.conditions;
        const BinningSpec& b = conditional_independence.binning;
        json bj;
        switch (b.strategy) {
            case BinningStrategy::explicit_edges: bj["strategy"] = "explicit_edges"; break;
            case BinningStrategy::quantile: bj["strategy"] = "quantile"; break;
            case BinningStrategy::equal_width: bj["strategy"] = "equal_width"; break;
        }
        if (b.strategy == BinningStrategy::explicit_edges) bj["edges"] = b.edges;
        else bj["k"] = b.k;
        c["binning"] = std::move(bj);
        m["conditional_independence"] = std::move(c);
    }
    if (separation.enabled) m["separation"] = tol_json(separation.tol);
    if (sufficiency.enabled) m["sufficiency"] = tol_json(sufficiency.tol);
    if (negative_dominance.enabled)
        m["negative_dominance"] = {{"protected_value", negative_dominance.protected_value}};
    if (individual.enabled) {
        const DistanceConfig& d = individual.distance;
        json i;
        i["lipschitz"] = d.lipschitz;
        i["output_mode"] = d.output_mode == OutputMode::label ? "label" : "score";
        i["scaling"] = d.numeric_scaling == NumericScaling::minmax ? "minmax" : "zscore";
        i["include_sensitive"] = d.include_sensitive;
        if (!d.feature_weights.empty()) {
            json w;
            for (const auto& [name, weight] : d.feature_weights) w[name] = weight;
            i["weights"] = std::move(w);
        }
        m["individual"] = std::move(i);
    }
    if (counterfactual.enabled)
        m["counterfactual"] = {{"graph", counterfactual.graph_path},
                               {"tau", counterfactual.tau},
                               {"aggregate", to_string(counterfactual.aggregate)}};
    if (proxy_scan.enabled) m["proxy_scan"] = {{"threshold", proxy_scan.threshold}};
    j["measures"] = std::move(m);
    return j;
}

AuditReport run_audit(const Dataset& ds, const AuditConfig& cfg, const std::string& csv_bytes) {
    std::vector<MeasureResult> results;
    std::vector<std::string> warnings;

    auto note_warnings = [&](const GroupMetricResult& r) {
        for (const auto& w : r.warnings)
            warnings.push_back(std::string(to_string(r.measure)) + ": " + w);
        if (r.verdict == Verdict::undefined && !r.reason.empty())
            warnings.push_back(std::string(to_string(r.measure)) + ": " + r.reason);
    };

    if (cfg.independence.enabled) {
        const auto r = independence(ds, cfg.independence.tol);
        note_warnings(r);
        results.push_back(as_measure_result(r));
    }
    if (cfg.conditional_independence.enabled) {
        const auto r = conditional_independence(ds, cfg.conditional_independence.conditions,
                                                cfg.conditional_independence.binning,
                                                cfg.conditional_independence.tol);
        note_warnings(r);
        results.push_back(as_measure_result(r));
    }
    if (cfg.separation.enabled) {
        const auto r = separation(ds, cfg.separation.tol);
        note_warnings(r);
        results.push_back(as_measure_result(r));
    }
    if (cfg.sufficiency.enabled) {
        const auto r = sufficiency(ds, cfg.sufficiency.tol);
        note_warnings(r);
        results.push_back(as_measure_result(r));
    }
    if (cfg.negative_dominance.enabled)
        results.push_back(
            as_measure_result(negative_dominance(ds, cfg.negative_dominance.protected_value)));
    if (cfg.individual.enabled)
        results.push_back(as_measure_result(individual_fairness_audit(ds, cfg.individual.distance)));
    if (cfg.counterfactual.enabled) {
        const GraphFile gf = load_graph_file(cfg.counterfactual.graph_path);
        const FittedSCM scm = gf.coefficients ? scm_from_coefficients(gf.graph, *gf.coefficients)
                                              : fit_scm(gf.graph, ds);
        results.push_back(as_measure_result(counterfactual_fairness_audit(
            scm, ds, cfg.counterfactual.tau, cfg.counterfactual.aggregate)));
    }
    if (cfg.proxy_scan.enabled)
        results.push_back(as_measure_result(proxy_scan(ds, cfg.proxy_scan.threshold)));

    if (results.empty()) throw AuditError("InvalidConfig", "no measure enabled");

    return assemble_report(content_digest(csv_bytes),
                           static_cast<std::int64_t>(ds.records.size()), cfg.snapshot(),
                           std::move(results), std::move(warnings));
}

}  // namespace fairaudit
