#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairaudit/errors.hpp"

namespace fairaudit {

enum class FeatureKind { numeric, categorical, binary };

// Numeric and binary features are stored as double (binary as 0.0/1.0),
// categorical features as their raw string.
using Value = std::variant<double, std::string>;

struct FeatureDef {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
};

struct Schema {
    std::vector<FeatureDef> features;
    std::string sensitive_attr;
    std::vector<std::string> sensitive_values;  // metrics require exactly two
    std::string predicted_col;
    std::optional<std::string> target_col;
    std::optional<std::string> score_col;
    std::string positive_label = "1";
    std::string negative_label = "0";

    // Column-name uniqueness, predicted/sensitive not doubling as features,
    // at least two sensitive values. Throws AuditError on violation.
    void validate() const;

    const FeatureDef* find_feature(const std::string& name) const;
};

// Exactly-two-values guard shared by every group metric.
void require_binary_sensitive(const Schema& schema);

struct DecisionRecord {
    std::map<std::string, Value> features;
    std::string sensitive;             // one of schema.sensitive_values
    int predicted = 0;                 // R, in {0,1}
    std::optional<int> target;         // Y, in {0,1} when present
    std::optional<double> score;       // in [0,1] when present

    bool operator==(const DecisionRecord&) const = default;
};

struct Dataset {
    Schema schema;
    std::vector<DecisionRecord> records;
};

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

// Appendix quality rates. A rate whose denominator is zero is absent rather
// than NaN.
struct QualityRates {
    std::optional<double> accuracy;
    std::optional<double> tpr;
    std::optional<double> tnr;
    std::optional<double> fpr;
    std::optional<double> precision;
    std::optional<double> for_rate;
};

// CSV ingestion: comma-delimited, UTF-8, first row is the header. The header
// must name every schema column; extra columns are ignored. Row order is
// preserved. Header-only input yields an empty dataset.
Dataset parse_dataset(const std::string& csv_text, const Schema& schema);

// Inverse of parse_dataset for well-formed datasets (round-trips exactly;
// doubles use shortest round-trip formatting).
std::string serialize_csv(const Dataset& ds);

// Order-preserving split into (group a1, group a2). Empty groups are allowed
// here; metric callers reject them.
std::pair<std::vector<DecisionRecord>, std::vector<DecisionRecord>>
partition_by_sensitive(const Dataset& ds);

// Requires a target label on every record.
ConfusionMatrix confusion_matrix(const std::vector<DecisionRecord>& records);

QualityRates rates(const ConfusionMatrix& cm);

// FNV-1a 64-bit over the raw bytes, rendered as "fnv1a64:<hex>". Used for the
// report's dataset digest.
std::string content_digest(const std::string& bytes);

}  // namespace fairaudit
