#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/fraction.hpp"

namespace fairaudit {

enum class Verdict { pass, fail, undefined };

const char* to_string(Verdict v);

struct Tolerance {
    double epsilon = 0.0;   // max allowed absolute rate difference, in [0,1]
    std::int64_t min_cell = 1;  // minimum records per group/cell for a defined comparison

    void validate() const;
};

enum class Measure {
    independence,
    conditional_independence,
    separation,
    sufficiency,
};

const char* to_string(Measure m);

// One named rate compared across the two groups.
struct Disparity {
    std::string rate_name;
    Rate group1;             // rate for sensitive value a1
    Rate group2;             // rate for sensitive value a2
    bool defined = false;    // both sides defined
    double abs_diff = 0.0;
    bool exact_zero = false; // cross-multiplied equality, immune to FP rounding
    double ratio = 1.0;      // min/max, informational
};

Disparity make_disparity(std::string name, Rate g1, Rate g2);

// Per-condition-cell detail for conditional independence.
struct CellResult {
    std::string cell_key;
    std::int64_t group1_count = 0;
    std::int64_t group2_count = 0;
    bool skipped = false;     // below min_cell in at least one group
    Disparity disparity;      // acceptance-rate comparison, when evaluated
    Verdict verdict = Verdict::undefined;
};

struct GroupMetricResult {
    Measure measure = Measure::independence;
    std::vector<Disparity> disparities;
    Verdict verdict = Verdict::undefined;
    std::string reason;                 // set when verdict is undefined
    std::vector<CellResult> cells;      // conditional independence only
    std::vector<std::string> warnings;  // skipped cells etc.
};

enum class BinningStrategy { explicit_edges, quantile, equal_width };

struct BinningSpec {
    BinningStrategy strategy = BinningStrategy::explicit_edges;
    int k = 2;                       // bin count for quantile/equal_width
    std::vector<double> edges;       // for explicit_edges; strictly increasing

    void validate() const;
};

struct Discretization {
    std::vector<int> assignment;   // bin index per input value
    std::vector<double> edges;     // internal edges actually used
    int bin_count = 1;
};

// Maps every value to exactly one bin; a value equal to an edge goes to the
// lower bin. Deterministic. Throws DegenerateBins when quantile/equal_width
// binning cannot produce k distinct bins.
Discretization discretize(const std::vector<double>& values, const BinningSpec& spec);

// Pr{R=1 | A=a} compared across groups.
GroupMetricResult independence(const Dataset& ds, const Tolerance& tol);

// Acceptance-rate parity within every cell of the (discretized) condition
// attributes. An empty condition list reduces to independence.
GroupMetricResult conditional_independence(const Dataset& ds,
                                           const std::vector<std::string>& condition_attrs,
                                           const BinningSpec& spec, const Tolerance& tol);

// Equal TPR and FPR across groups, given ground truth.
GroupMetricResult separation(const Dataset& ds, const Tolerance& tol);

// Equal precision and false omission rate across groups, given ground truth.
GroupMetricResult sufficiency(const Dataset& ds, const Tolerance& tol);

// Two-step statistical test for indirect discrimination: (1) the protected
// class forms a strict majority of the rejected, (2) only a strict minority
// of the protected class is accepted. Ties fail the step.
struct NegativeDominanceResult {
    std::string protected_value;
    Rate step1_ratio;        // protected share among R=0
    Rate step2_ratio;        // accepted share within protected class
    bool step1 = false;
    bool step2 = false;
    bool established = false;
};

NegativeDominanceResult negative_dominance(const Dataset& ds, const std::string& protected_value);

}  // namespace fairaudit
