#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairaudit/causal.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/group_metrics.hpp"
#include "fairaudit/individual.hpp"

namespace fairaudit {

using ordered_json = nlohmann::ordered_json;

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ExclusivityParams {
    int n1 = 0;              // group a1 size
    int n2 = 0;              // group a2 size
    Fraction q1;             // base rate of group a1; q1*n1 must be integral
    Fraction q2;
    double eps = 0.0;
};

// One enumerated prediction assignment. Bit i holds R for individual i;
// group a1 occupies bits [0, n1), group a2 bits [n1, n1+n2). Within each
// group the first q*n individuals carry Y=1.
struct AssignmentInfo {
    std::uint32_t bits = 0;
    bool independence = false;
    bool separation = false;
    bool sufficiency = false;
    // A measure with an undefined constituent rate imposes no constraint on
    // the assignment; it counts as satisfied and is flagged vacuous here.
    bool separation_vacuous = false;
    bool sufficiency_vacuous = false;
    bool constant = false;   // all-accept or all-reject
    bool perfect = false;    // R == Y
    bool degenerate = false; // constant, perfect, or equal group base rates
};

struct SearchOutcome {
    ExclusivityParams params;
    std::int64_t k1 = 0;  // positives in group a1
    std::int64_t k2 = 0;
    bool base_rates_equal = false;
    std::uint64_t total_assignments = 0;

    std::uint64_t count_independence = 0;
    std::uint64_t count_separation = 0;
    std::uint64_t count_sufficiency = 0;
    std::uint64_t count_ind_sep = 0;
    std::uint64_t count_ind_suf = 0;
    std::uint64_t count_sep_suf = 0;
    std::uint64_t count_joint = 0;
    std::uint64_t count_joint_degenerate = 0;
    std::uint64_t count_joint_nondegenerate = 0;

    std::optional<AssignmentInfo> joint_satisfier;   // first in enumeration order
    std::vector<AssignmentInfo> joint_examples;      // capped
    std::optional<AssignmentInfo> first_ind_sep;
    std::optional<AssignmentInfo> first_ind_suf;
    std::optional<AssignmentInfo> first_sep_suf;
};

// Exhaustively enumerates all 2^(n1+n2) prediction assignments over two
// groups with fixed base rates and reports which assignments satisfy
// Independence, Separation, Sufficiency and their pairs within eps.
// Deterministic; throws TooLarge beyond n = 14 per group.
SearchOutcome exclusivity_witness_search(const ExclusivityParams& params);

// Classifies a single assignment against the search convention; exposed so
// callers can re-verify candidates independently of the enumeration loop.
AssignmentInfo classify_assignment(const ExclusivityParams& params, std::uint32_t bits);

struct ProxyAssociation {
    std::string feature;
    double association = 0.0;  // in [0,1]
    bool flagged = false;
};

// Association of every feature with the sensitive attribute: normalized
// contingency association (Cramer's V) for categorical/binary features,
// absolute rank correlation for numeric ones.
std::vector<ProxyAssociation> proxy_scan(const Dataset& ds, double threshold);

// One entry of an audit report; detail carries the measure-specific payload.
struct MeasureResult {
    std::string measure;
    Verdict verdict = Verdict::undefined;
    ordered_json detail;
};

MeasureResult as_measure_result(const GroupMetricResult& r);
MeasureResult as_measure_result(const NegativeDominanceResult& r);
MeasureResult as_measure_result(const ViolationList& r);
MeasureResult as_measure_result(const CFResult& r);
MeasureResult as_measure_result(const std::vector<ProxyAssociation>& r);

ordered_json to_json(const SearchOutcome& o);
std::string search_outcome_text(const SearchOutcome& o);

struct AuditReport {
    std::string tool_version;
    std::string dataset_digest;
    std::int64_t record_count = 0;
    ordered_json config_snapshot;
    std::vector<MeasureResult> results;  // fixed measure order
    std::vector<std::string> warnings;
};

// Deterministic assembly: results sorted into the fixed measure order,
// duplicates rejected, digest and configuration embedded.
AuditReport assemble_report(const std::string& dataset_digest, std::int64_t record_count,
                            ordered_json config_snapshot, std::vector<MeasureResult> results,
                            std::vector<std::string> warnings);

ordered_json report_to_json(const AuditReport& report);

// Plaintext companion, one line per measure.
std::string report_summary(const AuditReport& report);

// fail if any measure failed, else undefined if any is undefined, else pass.
Verdict overall_verdict(const AuditReport& report);

}  // namespace fairaudit
