#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fairaudit/cli.hpp"
#include "fairaudit/config.hpp"
#include "fairaudit/graph_io.hpp"
#include "fairaudit/scenarios.hpp"

using namespace fairaudit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fairaudit_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

const char* kFig2Config = R"({
  // schema for the generated hiring fixtures
  "schema": {
    "sensitive": {"name": "gender", "values": ["f", "m"]},
    "predicted": "predicted",
    "target": "target"
  },
  "measures": {
    "independence": {"enabled": true, "epsilon": 0.0, "min_cell": 1}
  },
  "output": {"report": "REPORT", "summary": "SUMMARY"}
})";

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("fairaudit");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config: comments, defaults and field parsing") {
    TempDir dir;
    const std::string path = dir.file("cfg.json", R"({
      /* block comment */
      "schema": {
        "features": [{"name": "gpa", "kind": "numeric"}],
        "sensitive": {"name": "gender", "values": ["f", "m"]},
        "predicted": "predicted",
        "target": "target"
      },
      "measures": {
        "independence": {"enabled": true, "epsilon": 0.02},
        "conditional_independence": {
          "enabled": true, "conditions": ["gpa"],
          "binning": {"strategy": "explicit_edges", "edges": [3.0]}
        },
        "individual": {"enabled": true, "lipschitz": 2.0, "weights": {"gpa": 1.5}}
      }
    })");
    const AuditConfig cfg = load_config(path);
    CHECK(cfg.schema.features.size() == 1);
    CHECK(cfg.independence.enabled);
    CHECK(cfg.independence.tol.epsilon == 0.02);
    CHECK(cfg.independence.tol.min_cell == 1);  // default
    CHECK(cfg.conditional_independence.conditions == std::vector<std::string>{"gpa"});
    CHECK(cfg.conditional_independence.binning.edges == std::vector<double>{3.0});
    CHECK(cfg.individual.distance.lipschitz == 2.0);
    CHECK(cfg.individual.distance.feature_weights.at("gpa") == 1.5);
    CHECK(!cfg.separation.enabled);
    CHECK(cfg.report_path == "report.json");
}

TEST_CASE("config: alternate enum spellings parse") {
    TempDir dir;
    const std::string path = dir.file("cfg.json", R"({
      "schema": {
        "features": [{"name": "gpa", "kind": "numeric"}],
        "sensitive": {"name": "gender", "values": ["f", "m"]},
        "predicted": "predicted",
        "score": "score"
      },
      "measures": {
        "conditional_independence": {
          "enabled": true, "conditions": ["gpa"],
          "binning": {"strategy": "quantile", "k": 4}
        },
        "individual": {"enabled": true, "output_mode": "score", "scaling": "zscore"},
        "counterfactual": {"enabled": true, "graph": "g.json", "tau": 0.2, "aggregate": "mean"}
      }
    })");
    const AuditConfig cfg = load_config(path);
    CHECK(cfg.conditional_independence.binning.strategy == BinningStrategy::quantile);
    CHECK(cfg.conditional_independence.binning.k == 4);
    CHECK(cfg.individual.distance.output_mode == OutputMode::score);
    CHECK(cfg.individual.distance.numeric_scaling == NumericScaling::zscore);
    CHECK(cfg.counterfactual.aggregate == CFAggregate::mean);
    CHECK(cfg.counterfactual.tau == 0.2);
}

TEST_CASE("config: invalid inputs are rejected with named errors") {
    TempDir dir;
    try {
        load_config(dir.file("bad1.json", R"({"schema": {"sensitive": {"name": "g", "values": ["x"]},
            "predicted": "p"}})"));
        FAIL("expected InvalidSchema");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "InvalidSchema");
    }
    try {
        load_config(dir.file("bad2.json", R"({"schema": {"sensitive": {"name": "g", "values": ["a","b"]},
            "predicted": "p"}, "measures": {"negative_dominance": {"enabled": true}}})"));
        FAIL("expected InvalidConfig");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "InvalidConfig");
    }
    CHECK_THROWS_AS(load_config((dir.path / "missing.json").string()), AuditError);
}

TEST_CASE("config snapshot is deterministic") {
    TempDir dir;
    const std::string path =
        dir.file("cfg.json", replace_all(replace_all(kFig2Config, "REPORT", "r.json"), "SUMMARY",
                                         "s.txt"));
    const AuditConfig cfg = load_config(path);
    CHECK(cfg.snapshot().dump() == cfg.snapshot().dump());
    CHECK(cfg.snapshot().contains("schema"));
}

TEST_CASE("run_audit produces a pass report for fig2 with independence only") {
    const GeneratedScenario gen = generate({Scenario::fig2_independence, 0});
    const std::string csv = serialize_csv(gen.dataset);
    AuditConfig cfg;
    cfg.schema = gen.dataset.schema;
    cfg.independence.enabled = true;
    const AuditReport report = run_audit(gen.dataset, cfg, csv);
    CHECK(overall_verdict(report) == Verdict::pass);
    CHECK(report.dataset_digest == content_digest(csv));
    CHECK(report.record_count == 40);
    const ordered_json j = report_to_json(report);
    CHECK(j["results"].size() == 1);
    CHECK(j["overall"] == "pass");
}

TEST_CASE("run_audit with no enabled measure is a config error") {
    const GeneratedScenario gen = generate({Scenario::fig2_independence, 0});
    AuditConfig cfg;
    cfg.schema = gen.dataset.schema;
    CHECK_THROWS_AS(run_audit(gen.dataset, cfg, "x"), AuditError);
}

TEST_CASE("cli: version and usage errors") {
    CHECK(run({"version"}) == 0);
    CHECK(run({"bogus_subcommand"}) == 64);
    CHECK(run({}) == 64);
    CHECK(run({"audit"}) == 64);  // missing required options
}

TEST_CASE("cli: generate + audit end to end, exit codes follow verdicts") {
    TempDir dir;
    const std::string csv = (dir.path / "fig2.csv").string();
    const std::string report = (dir.path / "report.json").string();
    const std::string summary = (dir.path / "report.txt").string();
    CHECK(run({"generate", "fig2_independence", "--out", csv}) == 0);

    const std::string cfg = dir.file(
        "cfg.json", replace_all(replace_all(kFig2Config, "REPORT", report), "SUMMARY", summary));
    CHECK(run({"audit", "--data", csv, "--config", cfg}) == 0);
    CHECK(fs::exists(report));
    CHECK(fs::exists(summary));
    const std::string first = slurp(report);

    // identical inputs give byte-identical reports
    CHECK(run({"audit", "--data", csv, "--config", cfg}) == 0);
    CHECK(slurp(report) == first);

    // separation fails on fig2 data -> exit 2
    const std::string cfg_fail = dir.file("cfg_fail.json", replace_all(replace_all(R"({
      "schema": {"sensitive": {"name": "gender", "values": ["f", "m"]},
                 "predicted": "predicted", "target": "target"},
      "measures": {"separation": {"enabled": true, "epsilon": 0.0}},
      "output": {"report": "REPORT", "summary": "SUMMARY"}
    })", "REPORT", report), "SUMMARY", summary));
    CHECK(run({"audit", "--data", csv, "--config", cfg_fail}) == 2);

    // a loose epsilon override turns the failure into a pass
    CHECK(run({"audit", "--data", csv, "--config", cfg_fail, "--epsilon", "1.0"}) == 0);
}

TEST_CASE("cli: missing sensitive column exits 1 with the error name") {
    TempDir dir;
    const std::string csv = dir.file("data.csv", "someone,predicted,target\nx,1,1\n");
    const std::string cfg = dir.file(
        "cfg.json",
        replace_all(replace_all(kFig2Config, "REPORT", (dir.path / "r.json").string()), "SUMMARY",
                    (dir.path / "s.txt").string()));
    CHECK(run({"audit", "--data", csv, "--config", cfg}) == 1);
}

TEST_CASE("cli: undefined-only audits exit 3") {
    TempDir dir;
    // one-group data: independence is undefined, nothing fails
    const std::string csv = dir.file("data.csv", "gender,predicted,target\nf,1,1\nf,0,0\n");
    const std::string cfg = dir.file(
        "cfg.json",
        replace_all(replace_all(kFig2Config, "REPORT", (dir.path / "r.json").string()), "SUMMARY",
                    (dir.path / "s.txt").string()));
    CHECK(run({"audit", "--data", csv, "--config", cfg}) == 3);
}

TEST_CASE("cli: exclusivity and counterfactual subcommands run") {
    TempDir dir;
    CHECK(run({"exclusivity", "--n1", "4", "--n2", "4", "--q1", "1/2", "--q2", "1/4"}) == 0);
    CHECK(run({"exclusivity", "--n1", "4", "--n2", "4", "--q1", "0.5", "--q2", "0.25", "--json"}) ==
          0);
    CHECK(run({"exclusivity", "--n1", "20", "--n2", "4", "--q1", "1/2", "--q2", "1/4"}) == 1);

    const std::string csv = (dir.path / "bob.csv").string();
    const std::string graph = (dir.path / "bob_graph.json").string();
    CHECK(run({"generate", "bob_counterfactual", "--out", csv, "--graph-out", graph}) == 0);
    const std::string cfg = dir.file("bob_cfg.json", R"({
      "schema": {
        "features": [{"name": "GPA", "kind": "numeric"}],
        "sensitive": {"name": "A", "values": ["0", "1"]},
        "predicted": "predicted",
        "score": "Y"
      },
      "measures": {"counterfactual": {"enabled": true, "graph": "GRAPH", "tau": 0.1}}
    })");
    const std::string cfg2 = dir.file("bob_cfg2.json", replace_all(slurp(cfg), "GRAPH", graph));
    CHECK(run({"counterfactual", "--data", csv, "--config", cfg2, "--graph", graph, "--record",
               "0", "--export-scm", (dir.path / "scm.json").string()}) == 0);
    CHECK(fs::exists(dir.path / "scm.json"));

    // the exported SCM is itself a loadable graph file
    const GraphFile round = load_graph_file((dir.path / "scm.json").string());
    REQUIRE(round.coefficients.has_value());
    CHECK(round.coefficients->at("GPA").at("A") == 0.2);

    // full audit with the counterfactual measure enabled
    const std::string audit_cfg = dir.file("bob_audit.json", replace_all(R"({
      "schema": {
        "features": [{"name": "GPA", "kind": "numeric"}],
        "sensitive": {"name": "A", "values": ["0", "1"]},
        "predicted": "predicted",
        "score": "Y"
      },
      "measures": {"counterfactual": {"enabled": true, "graph": "GRAPH", "tau": 0.1, "aggregate": "max"}},
      "output": {"report": "RP", "summary": "SM"}
    })", "GRAPH", graph));
    const std::string audit_cfg2 = dir.file(
        "bob_audit2.json",
        replace_all(replace_all(slurp(audit_cfg), "RP", (dir.path / "r.json").string()), "SM",
                    (dir.path / "s.txt").string()));
    CHECK(run({"audit", "--data", csv, "--config", audit_cfg2}) == 0);
    CHECK(run({"audit", "--data", csv, "--config", audit_cfg2, "--tau", "0.01"}) == 2);

    // a graph file without a coefficient section goes through the fitting path
    const GraphFile declared = load_graph_file(graph);
    const std::string bare_graph = (dir.path / "bare_graph.json").string();
    {
        std::ofstream out(bare_graph);
        out << graph_to_json(declared.graph).dump(2) << "\n";
    }
    CHECK(run({"counterfactual", "--data", csv, "--config", cfg2, "--graph", bare_graph}) == 0);
    CHECK(run({"audit", "--data", csv, "--config", audit_cfg2, "--graph", bare_graph, "--tau",
               "1.0"}) == 0);
}
