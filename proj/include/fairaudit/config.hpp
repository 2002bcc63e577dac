#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairaudit/analysis.hpp"
#include "fairaudit/causal.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/group_metrics.hpp"
#include "fairaudit/individual.hpp"

namespace fairaudit {

// One config file governs a run: a schema section, per-measure settings and
// the output paths. JSON with // and /* */ comments tolerated.
struct AuditConfig {
    Schema schema;

    struct {
        bool enabled = false;
        Tolerance tol;
    } independence;

    struct {
        bool enabled = false;
        Tolerance tol;
        std::vector<std::string> conditions;
        BinningSpec binning;
    } conditional_independence;

    struct {
        bool enabled = false;
        Tolerance tol;
    } separation;

    struct {
        bool enabled = false;
        Tolerance tol;
    } sufficiency;

    struct {
        bool enabled = false;
        std::string protected_value;
    } negative_dominance;

    struct {
        bool enabled = false;
        DistanceConfig distance;
    } individual;

    struct {
        bool enabled = false;
        std::string graph_path;
        double tau = 0.0;
        CFAggregate aggregate = CFAggregate::max;
    } counterfactual;

    struct {
        bool enabled = false;
        double threshold = 0.8;
    } proxy_scan;

    std::string report_path = "report.json";
    std::string summary_path;  // defaults to report_path + ".txt"

    std::string resolved_summary_path() const {
        return summary_path.empty() ? report_path + ".txt" : summary_path;
    }

    // Normalized snapshot with defaults filled in, embedded into reports.
    ordered_json snapshot() const;
};

AuditConfig config_from_json(const ordered_json& j);
AuditConfig load_config(const std::string& path);

// Runs every enabled measure over the dataset and assembles the report.
// csv_bytes feeds the dataset digest.
AuditReport run_audit(const Dataset& ds, const AuditConfig& cfg, const std::string& csv_bytes);

}  // namespace fairaudit
