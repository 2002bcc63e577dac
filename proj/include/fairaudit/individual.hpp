#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/group_metrics.hpp"

namespace fairaudit {

enum class NumericScaling { minmax, zscore };
enum class OutputMode { label, score };

// Parameterization of the input metric d and output metric D. The metric
// choice is an audit input and is echoed into the report.
struct DistanceConfig {
    NumericScaling numeric_scaling = NumericScaling::minmax;
    std::map<std::string, double> feature_weights;  // default weight 1
    double lipschitz = 1.0;
    OutputMode output_mode = OutputMode::label;
    bool include_sensitive = false;  // sensitive attribute joins d when true

    void validate() const;
};

// Per-feature scaling statistics, computed once from the audited dataset.
struct ScalingStats {
    struct FeatureStats {
        double min = 0.0, max = 0.0;    // minmax
        double mean = 0.0, sd = 0.0;    // zscore
    };
    std::map<std::string, FeatureStats> numeric;
};

ScalingStats compute_scaling_stats(const Dataset& ds);

// Weighted mean of per-feature distances, each in [0,1]: numeric features use
// the scaled absolute difference (constant features contribute 0), categorical
// and binary features the discrete 0/1 metric. Symmetric, d(r,r) = 0.
double feature_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                        const DistanceConfig& cfg, const Schema& schema,
                        const ScalingStats& stats);

// Convenience overload computing the scaling statistics from ds.
double feature_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                        const DistanceConfig& cfg, const Dataset& ds);

// Label mode: |R1 - R2|; score mode: |s1 - s2|.
double output_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                       const DistanceConfig& cfg);

struct PairViolation {
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;      // input distance
    double D = 0.0;      // output distance
    double excess = 0.0; // D - L*d
};

struct ViolationList {
    std::vector<PairViolation> pairs;  // descending excess, ties by (i, j)
    std::size_t pairs_checked = 0;
    Verdict verdict = Verdict::pass;
};

// Checks D <= L*d over all unordered pairs; identical individuals (d = 0)
// must receive identical outputs.
ViolationList individual_fairness_audit(const Dataset& ds, const DistanceConfig& cfg);

}  // namespace fairaudit
