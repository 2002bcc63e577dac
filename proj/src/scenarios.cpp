#include "fairaudit/scenarios.hpp"

namespace fairaudit {

namespace {

Schema group_schema(bool with_target) {
    Schema s;
    s.sensitive_attr = "gender";
    s.sensitive_values = {"f", "m"};
    s.predicted_col = "predicted";
    if (with_target) s.target_col = "target";
    return s;
}

DecisionRecord group_record(const std::string& sensitive, int predicted,
                            std::optional<int> target = std::nullopt) {
    DecisionRecord r;
    r.sensitive = sensitive;
    r.predicted = predicted;
    r.target = target;
    return r;
}

// Lowest indices are qualified and lowest indices are accepted, so the
// fixtures are byte-stable.
void add_group(Dataset& ds, const std::string& sensitive, int total, int qualified, int accepted) {
    for (int i = 0; i < total; ++i)
        ds.records.push_back(group_record(sensitive, i < accepted ? 1 : 0, i < qualified ? 1 : 0));
}

Dataset fig2() {
    // 10 women (3 qualified), 30 men (15 qualified); 40% accepted per group.
    Dataset ds;
    ds.schema = group_schema(true);
    add_group(ds, "f", 10, 3, 4);
    add_group(ds, "m", 30, 15, 12);
    return ds;
}

Dataset fig3() {
    // TPR 2/3 in both groups (2/3 and 10/15), FPR 0 in both.
    Dataset ds;
    ds.schema = group_schema(true);
    add_group(ds, "f", 10, 3, 2);
    add_group(ds, "m", 30, 15, 10);
    return ds;
}

Dataset fig4() {
    // precision 3/4 in both groups (3/4 and 9/12), FOR 0 in both. Group
    // sizes follow the 10/30 hiring story; the caption fixes only the rates.
    Dataset ds;
    ds.schema = group_schema(true);
    for (int i = 0; i < 10; ++i)
        ds.records.push_back(group_record("f", i < 4 ? 1 : 0, i < 3 ? 1 : 0));
    for (int i = 0; i < 30; ++i)
        ds.records.push_back(group_record("m", i < 12 ? 1 : 0, i < 9 ? 1 : 0));
    return ds;
}

Dataset gpa_conditional() {
    // 1000 applicants: 400 women / 600 men; 160 and 360 above the GPA
    // threshold; 32 and 72 accepted among them; nobody below the threshold
    // is accepted.
    Dataset ds;
    ds.schema = group_schema(false);
    ds.schema.features.push_back({"gpa", FeatureKind::numeric});

    auto add = [&](const std::string& sensitive, int count, double gpa, int accepted) {
        for (int i = 0; i < count; ++i) {
            DecisionRecord r = group_record(sensitive, i < accepted ? 1 : 0);
            r.features["gpa"] = gpa;
            ds.records.push_back(std::move(r));
        }
    };
    add("f", 160, 3.5, 32);
    add("f", 240, 2.0, 0);
    add("m", 360, 3.5, 72);
    add("m", 240, 2.0, 0);
    return ds;
}

GeneratedScenario bob_counterfactual() {
    GeneratedScenario out;

    Schema s;
    s.features.push_back({"GPA", FeatureKind::numeric});
    s.sensitive_attr = "A";
    s.sensitive_values = {"0", "1"};
    s.predicted_col = "predicted";
    s.score_col = "Y";
    out.dataset.schema = s;

    auto add = [&](int a, double gpa, double y) {
        DecisionRecord r;
        r.features["GPA"] = gpa;
        r.sensitive = a ? "1" : "0";
        r.score = y;
        r.predicted = y >= 0.5 ? 1 : 0;
        out.dataset.records.push_back(std::move(r));
    };

    // Bob's row first: A=1, GPA=0.75, Y=0.7.
    add(1, 0.75, 0.7);
    // A deterministic grid of rows generated from the same equations,
    // GPA = 0.2*A + 0.8*K and Y = 0.4*GPA + 0.6*D with K, D in {.25, .5, .75}.
    const double latents[] = {0.25, 0.5, 0.75};
    for (int a = 0; a <= 1; ++a)
        for (double k : latents)
            for (double d : latents) {
                const double gpa = 0.2 * a + 0.8 * k;
                add(a, gpa, 0.4 * gpa + 0.6 * d);
            }

    CausalGraph g;
    g.nodes = {{"A", NodeKind::observed},
               {"K", NodeKind::latent},
               {"GPA", NodeKind::observed},
               {"D", NodeKind::latent},
               {"Y", NodeKind::observed}};
    g.edges = {{"A", "GPA"}, {"K", "GPA"}, {"GPA", "Y"}, {"D", "Y"}};
    g.sensitive_node = "A";
    g.output_node = "Y";
    out.graph = g;
    out.coefficients = CoefficientMap{
        {"GPA", {{"A", 0.2}, {"K", 0.8}}},
        {"Y", {{"GPA", 0.4}, {"D", 0.6}}},
    };
    return out;
}

}  // namespace

GeneratedScenario generate(const ScenarioSpec& spec) {
    GeneratedScenario out;
    switch (spec.name) {
        case Scenario::fig2_independence: out.dataset = fig2(); return out;
        case Scenario::fig3_separation: out.dataset = fig3(); return out;
        case Scenario::fig4_sufficiency: out.dataset = fig4(); return out;
        case Scenario::gpa_conditional: out.dataset = gpa_conditional(); return out;
        case Scenario::bob_counterfactual: return bob_counterfactual();
    }
    throw AuditError("UnknownScenario", "unhandled scenario");
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::fig2_independence: return "fig2_independence";
        case Scenario::fig3_separation: return "fig3_separation";
        case Scenario::fig4_sufficiency: return "fig4_sufficiency";
        case Scenario::gpa_conditional: return "gpa_conditional";
        case Scenario::bob_counterfactual: return "bob_counterfactual";
    }
    return "?";
}

std::vector<std::string> scenario_names() {
    return {"fig2_independence", "fig3_separation", "fig4_sufficiency", "gpa_conditional",
            "bob_counterfactual"};
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "fig2_independence" || name == "fig2") return Scenario::fig2_independence;
    if (name == "fig3_separation" || name == "fig3") return Scenario::fig3_separation;
    if (name == "fig4_sufficiency" || name == "fig4") return Scenario::fig4_sufficiency;
    if (name == "gpa_conditional") return Scenario::gpa_conditional;
    if (name == "bob_counterfactual" || name == "bob") return Scenario::bob_counterfactual;
    throw AuditError("UnknownScenario", "no scenario named '" + name + "'");
}

}  // namespace fairaudit
