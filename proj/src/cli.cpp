#include "fairaudit/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "fairaudit/analysis.hpp"
#include "fairaudit/config.hpp"
#include "fairaudit/graph_io.hpp"
#include "fairaudit/scenarios.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AuditError("InvalidInput", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// temp file + rename, so readers never observe a half-written report
void write_file_atomic(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw AuditError("InvalidInput", "cannot write '" + tmp + "'");
        out << bytes;
        if (!out.good()) throw AuditError("InvalidInput", "short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw AuditError("InvalidInput", "cannot rename '" + tmp + "' to '" + path + "'");
}

Fraction parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            return {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) return {std::stoll(text), 1};
        const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        Fraction f{std::stoll(digits), 1};
        for (std::size_t i = dot + 1; i < text.size(); ++i) f.den *= 10;
        return f;
    } catch (const std::exception&) {
        throw AuditError("InvalidArgument", "cannot parse rate '" + text + "'");
    }
}

int exit_code_for(Verdict v) {
    switch (v) {
        case Verdict::pass: return 0;
        case Verdict::fail: return 2;
        case Verdict::undefined: return 3;
    }
    return 1;
}

int cmd_audit(const std::string& data_path, const std::string& config_path,
              const std::string& report_override, const std::string& summary_override,
              const std::string& graph_override, std::optional<double> epsilon_override,
              std::optional<double> tau_override) {
    AuditConfig cfg = load_config(config_path);
    if (!graph_override.empty()) cfg.counterfactual.graph_path = graph_override;
    if (epsilon_override) {
        cfg.independence.tol.epsilon = *epsilon_override;
        cfg.conditional_independence.tol.epsilon = *epsilon_override;
        cfg.separation.tol.epsilon = *epsilon_override;
        cfg.sufficiency.tol.epsilon = *epsilon_override;
    }
    if (tau_override) cfg.counterfactual.tau = *tau_override;
    if (!report_override.empty()) cfg.report_path = report_override;
    if (!summary_override.empty()) cfg.summary_path = summary_override;

    const std::string csv = read_file(data_path);
    const Dataset ds = parse_dataset(csv, cfg.schema);
    const AuditReport report = run_audit(ds, cfg, csv);

    write_file_atomic(cfg.report_path, report_to_json(report).dump(2) + "\n");
    const std::string summary = report_summary(report);
    write_file_atomic(cfg.resolved_summary_path(), summary);
    std::cout << summary;
    return exit_code_for(overall_verdict(report));
}

int cmd_generate(const std::string& name, std::string out_path, std::string graph_out) {
    const Scenario scenario = scenario_from_name(name);
    const GeneratedScenario gen = generate({scenario, 0});
    if (out_path.empty()) out_path = std::string(to_string(scenario)) + ".csv";
    write_file_atomic(out_path, serialize_csv(gen.dataset));
    std::cout << "wrote " << out_path << " (" << gen.dataset.records.size() << " records)\n";
    if (gen.graph) {
        if (graph_out.empty()) graph_out = std::string(to_string(scenario)) + "_graph.json";
        const CoefficientMap* coeffs = gen.coefficients ? &*gen.coefficients : nullptr;
        write_file_atomic(graph_out, graph_to_json(*gen.graph, coeffs).dump(2) + "\n");
        std::cout << "wrote " << graph_out << "\n";
    }
    return 0;
}

int cmd_exclusivity(int n1, int n2, const std::string& q1, const std::string& q2, double eps,
                    bool as_json) {
    ExclusivityParams params;
    params.n1 = n1;
    params.n2 = n2;
    params.q1 = parse_fraction(q1);
    params.q2 = parse_fraction(q2);
    params.eps = eps;
    const SearchOutcome outcome = exclusivity_witness_search(params);
    if (as_json)
        std::cout << to_json(outcome).dump(2) << "\n";
    else
        std::cout << search_outcome_text(outcome);
    return 0;
}

int cmd_counterfactual(const std::string& data_path, const std::string& config_path,
                       const std::string& graph_path, std::size_t record_index,
                       const std::string& export_path) {
    const AuditConfig cfg = load_config(config_path);
    const std::string csv = read_file(data_path);
    const Dataset ds = parse_dataset(csv, cfg.schema);
    if (record_index >= ds.records.size())
        throw AuditError("InvalidArgument", "record index " + std::to_string(record_index) +
                                                " out of range (dataset has " +
                                                std::to_string(ds.records.size()) + " records)");

    const GraphFile gf = load_graph_file(graph_path);
    FittedSCM scm;
    if (gf.coefficients) {
        scm = scm_from_coefficients(gf.graph, *gf.coefficients);
        std::cout << "using declared coefficients from " << graph_path << "\n";
    } else {
        scm = fit_scm(gf.graph, ds);
        std::cout << "fitted coefficients from " << data_path << ":\n";
        for (const auto& eq : scm.equations) {
            std::cout << "  " << eq.child << " =";
            for (std::size_t i = 0; i < eq.terms.size(); ++i)
                std::cout << (i ? " + " : " ") << eq.terms[i].coef << "*" << eq.terms[i].parent;
            std::cout << "   (ssr " << scm.residual_sums.at(eq.child) << ")\n";
        }
    }

    const DecisionRecord& rec = ds.records[record_index];
    const LatentAssignment latents = abduct(scm, ds.schema, rec);
    std::cout << "record " << record_index << " (A=" << rec.sensitive << "):\n";
    std::cout << "  abducted latents:\n";
    for (const auto& [name, value] : latents.values)
        std::cout << "    " << name << " = " << value << "\n";

    require_binary_sensitive(ds.schema);
    const std::string& flipped = rec.sensitive == ds.schema.sensitive_values[0]
                                     ? ds.schema.sensitive_values[1]
                                     : ds.schema.sensitive_values[0];
    const CounterfactualOutcome cf = intervene_predict(scm, ds.schema, latents, rec, flipped);
    std::cout << "  intervention " << ds.schema.sensitive_attr << " <- " << flipped << ":\n";
    for (const auto& [name, value] : cf.values) std::cout << "    " << name << " = " << value << "\n";
    const double actual = observed_node_value(ds.schema, rec, scm.graph.output_node);
    std::cout << "  output " << scm.graph.output_node << ": actual " << actual
              << ", counterfactual " << cf.output << ", delta " << std::abs(actual - cf.output)
              << "\n";

    if (!export_path.empty()) {
        write_file_atomic(export_path, scm_to_json(scm).dump(2) + "\n");
        std::cout << "wrote " << export_path << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"fairness audit toolkit for binary decision datasets"};
    app.require_subcommand(1);

    // audit
    auto* audit = app.add_subcommand("audit", "run the configured measures over a CSV dataset");
    std::string data_path, config_path, report_override, summary_override, graph_override;
    std::optional<double> epsilon_override, tau_override;
    audit->add_option("--data", data_path, "input CSV file")->required();
    audit->add_option("--config", config_path, "audit config (JSON, comments allowed)")->required();
    audit->add_option("--report", report_override, "report output path (overrides config)");
    audit->add_option("--summary", summary_override, "summary output path (overrides config)");
    audit->add_option("--graph", graph_override, "causal graph file (overrides config)");
    audit->add_option("--epsilon", epsilon_override, "override epsilon for all group measures");
    audit->add_option("--tau", tau_override, "override the counterfactual threshold");

    // generate
    auto* gen = app.add_subcommand("generate", "write a named scenario dataset");
    std::string scenario_name, out_path, graph_out;
    gen->add_option("scenario", scenario_name, "one of: fig2_independence, fig3_separation, "
                                               "fig4_sufficiency, gpa_conditional, bob_counterfactual")
        ->required();
    gen->add_option("--out", out_path, "CSV output path (default <scenario>.csv)");
    gen->add_option("--graph-out", graph_out, "graph output path (bob_counterfactual)");

    // exclusivity
    auto* excl = app.add_subcommand("exclusivity", "exhaustive mutual-exclusivity witness search");
    int n1 = 4, n2 = 4;
    std::string q1 = "1/2", q2 = "1/4";
    double eps = 0.0;
    bool excl_json = false;
    excl->add_option("--n1", n1, "size of group a1")->required();
    excl->add_option("--n2", n2, "size of group a2")->required();
    excl->add_option("--q1", q1, "base rate of group a1, e.g. 1/2 or 0.5")->required();
    excl->add_option("--q2", q2, "base rate of group a2")->required();
    excl->add_option("--eps", eps, "tolerance on rate differences");
    excl->add_flag("--json", excl_json, "print the outcome as JSON");

    // counterfactual
    auto* cf = app.add_subcommand("counterfactual", "fit/abduct/intervene on a single record");
    std::string cf_data, cf_config, cf_graph, cf_export;
    std::size_t record_index = 0;
    cf->add_option("--data", cf_data, "input CSV file")->required();
    cf->add_option("--config", cf_config, "audit config providing the schema")->required();
    cf->add_option("--graph", cf_graph, "causal graph file")->required();
    cf->add_option("--record", record_index, "record index (default 0)");
    cf->add_option("--export-scm", cf_export, "write the SCM (graph + coefficients) to this path");

    // version
    auto* version = app.add_subcommand("version", "print tool name and version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (audit->parsed())
            return cmd_audit(data_path, config_path, report_override, summary_override,
                             graph_override, epsilon_override, tau_override);
        if (gen->parsed()) return cmd_generate(scenario_name, out_path, graph_out);
        if (excl->parsed()) return cmd_exclusivity(n1, n2, q1, q2, eps, excl_json);
        if (cf->parsed())
            return cmd_counterfactual(cf_data, cf_config, cf_graph, record_index, cf_export);
        if (version->parsed()) {
            std::cout << kToolName << " " << kToolVersion << "\n";
            return 0;
        }
    } catch (const AuditError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}

}  // namespace fairaudit
