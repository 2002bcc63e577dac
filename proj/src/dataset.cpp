#include "fairaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace fairaudit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// 0/1 plus the schema's configured class labels.
std::optional<int> parse_label(const std::string& raw, const Schema& schema) {
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    if (raw == schema.positive_label) return 1;
    if (raw == schema.negative_label) return 0;
    return std::nullopt;
}

}  // namespace

void Schema::validate() const {
    std::set<std::string> names;
    auto add = [&](const std::string& n, const char* what) {
        if (n.empty()) throw AuditError("InvalidSchema", std::string(what) + " name is empty");
        if (!names.insert(n).second)
            throw AuditError("InvalidSchema", "duplicate column name '" + n + "'");
    };
    for (const auto& f : features) add(f.name, "feature");
    add(sensitive_attr, "sensitive attribute");
    add(predicted_col, "predicted column");
    if (target_col) add(*target_col, "target column");
    if (score_col) add(*score_col, "score column");

    if (sensitive_values.size() < 2)
        throw AuditError("InvalidSchema", "sensitive attribute needs at least two declared values");
    std::set<std::string> vals(sensitive_values.begin(), sensitive_values.end());
    if (vals.size() != sensitive_values.size())
        throw AuditError("InvalidSchema", "duplicate sensitive value");
}

const FeatureDef* Schema::find_feature(const std::string& name) const {
    for (const auto& f : features)
        if (f.name == name) return &f;
    return nullptr;
}

void require_binary_sensitive(const Schema& schema) {
    if (schema.sensitive_values.size() != 2)
        throw errors::unsupported_cardinality(schema.sensitive_values.size());
}

Dataset parse_dataset(const std::string& csv_text, const Schema& schema) {
    schema.validate();

    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : csv_text) {
            if (c == '\n') {
                if (!cur.empty() && cur.back() == '\r') cur.pop_back();
                lines.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) {
            if (cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
        }
    }
    if (lines.empty()) throw AuditError("InvalidInput", "CSV has no header row");

    const std::vector<std::string> header = split_csv_line(lines[0]);
    auto col_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw errors::missing_column(name);
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::pair<const FeatureDef*, std::size_t>> feature_cols;
    feature_cols.reserve(schema.features.size());
    for (const auto& f : schema.features) feature_cols.emplace_back(&f, col_index(f.name));
    const std::size_t sensitive_idx = col_index(schema.sensitive_attr);
    const std::size_t predicted_idx = col_index(schema.predicted_col);
    std::optional<std::size_t> target_idx, score_idx;
    if (schema.target_col) target_idx = col_index(*schema.target_col);
    if (schema.score_col) score_idx = col_index(*schema.score_col);

    Dataset ds;
    ds.schema = schema;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        const auto fields = split_csv_line(lines[row]);
        if (fields.size() != header.size())
            throw AuditError("BadValue", "row " + std::to_string(row - 1) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
        const std::size_t rec_idx = row - 1;

        DecisionRecord rec;
        for (const auto& [def, idx] : feature_cols) {
            const std::string& raw = fields[idx];
            switch (def->kind) {
                case FeatureKind::numeric: {
                    auto v = parse_double(raw);
                    if (!v) throw errors::bad_value(rec_idx, def->name, "not numeric: '" + raw + "'");
                    rec.features[def->name] = *v;
                    break;
                }
                case FeatureKind::binary: {
                    auto v = parse_label(raw, schema);
                    if (!v) throw errors::bad_value(rec_idx, def->name, "not binary: '" + raw + "'");
                    rec.features[def->name] = static_cast<double>(*v);
                    break;
                }
                case FeatureKind::categorical:
                    rec.features[def->name] = raw;
                    break;
            }
        }

        rec.sensitive = fields[sensitive_idx];
        if (std::find(schema.sensitive_values.begin(), schema.sensitive_values.end(),
                      rec.sensitive) == schema.sensitive_values.end())
            throw errors::bad_value(rec_idx, schema.sensitive_attr,
                                    "value '" + rec.sensitive + "' not among declared values");

        auto pred = parse_label(fields[predicted_idx], schema);
        if (!pred)
            throw errors::bad_value(rec_idx, schema.predicted_col,
                                    "not a class label: '" + fields[predicted_idx] + "'");
        rec.predicted = *pred;

        if (target_idx) {
            const std::string& raw = fields[*target_idx];
            if (!raw.empty()) {
                auto t = parse_label(raw, schema);
                if (!t) throw errors::bad_value(rec_idx, *schema.target_col,
                                                "not a class label: '" + raw + "'");
                rec.target = *t;
            }
        }
        if (score_idx) {
            const std::string& raw = fields[*score_idx];
            if (!raw.empty()) {
                auto s = parse_double(raw);
                if (!s || *s < 0.0 || *s > 1.0)
                    throw errors::bad_value(rec_idx, *schema.score_col,
                                            "score not in [0,1]: '" + raw + "'");
                rec.score = *s;
            }
        }
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

std::string serialize_csv(const Dataset& ds) {
    const Schema& s = ds.schema;
    std::string out;

    std::vector<std::string> cols;
    for (const auto& f : s.features) cols.push_back(f.name);
    cols.push_back(s.sensitive_attr);
    cols.push_back(s.predicted_col);
    if (s.target_col) cols.push_back(*s.target_col);
    if (s.score_col) cols.push_back(*s.score_col);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(cols[i]);
    }
    out += '\n';

    for (const auto& rec : ds.records) {
        std::size_t i = 0;
        for (const auto& f : s.features) {
            if (i++) out += ',';
            const Value& v = rec.features.at(f.name);
            if (std::holds_alternative<double>(v)) {
                const double d = std::get<double>(v);
                if (f.kind == FeatureKind::binary)
                    out += (d != 0.0) ? '1' : '0';
                else
                    out += format_double(d);
            } else {
                out += csv_escape(std::get<std::string>(v));
            }
        }
        if (i++) out += ',';
        out += csv_escape(rec.sensitive);
        out += ',';
        out += rec.predicted ? '1' : '0';
        if (s.target_col) {
            out += ',';
            if (rec.target) out += *rec.target ? '1' : '0';
        }
        if (s.score_col) {
            out += ',';
            if (rec.score) out += format_double(*rec.score);
        }
        out += '\n';
    }
    return out;
}

std::pair<std::vector<DecisionRecord>, std::vector<DecisionRecord>>
partition_by_sensitive(const Dataset& ds) {
    require_binary_sensitive(ds.schema);
    std::vector<DecisionRecord> a1, a2;
    for (const auto& rec : ds.records) {
        if (rec.sensitive == ds.schema.sensitive_values[0])
            a1.push_back(rec);
        else
            a2.push_back(rec);
    }
    return {std::move(a1), std::move(a2)};
}

ConfusionMatrix confusion_matrix(const std::vector<DecisionRecord>& records) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (!rec.target) throw errors::missing_target(i);
        if (rec.predicted == 1)
            (*rec.target == 1 ? cm.tp : cm.fp)++;
        else
            (*rec.target == 1 ? cm.fn : cm.tn)++;
    }
    return cm;
}

QualityRates rates(const ConfusionMatrix& cm) {
    QualityRates r;
    auto frac = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.accuracy = frac(cm.tp + cm.tn, cm.total());
    r.tpr = frac(cm.tp, cm.tp + cm.fn);
    r.tnr = frac(cm.tn, cm.fp + cm.tn);
    r.fpr = frac(cm.fp, cm.fp + cm.tn);
    r.precision = frac(cm.tp, cm.tp + cm.fp);
    r.for_rate = frac(cm.fn, cm.fn + cm.tn);
    return r;
}

std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fairaudit
