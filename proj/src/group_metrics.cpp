#include "fairaudit/group_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace fairaudit {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::undefined: return "undefined";
    }
    return "?";
}

const char* to_string(Measure m) {
    switch (m) {
        case Measure::independence: return "independence";
        case Measure::conditional_independence: return "conditional_independence";
        case Measure::separation: return "separation";
        case Measure::sufficiency: return "sufficiency";
    }
    return "?";
}

void Tolerance::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw AuditError("InvalidArgument", "epsilon must be in [0,1]");
    if (min_cell < 1) throw AuditError("InvalidArgument", "min_cell must be >= 1");
}

Disparity make_disparity(std::string name, Rate g1, Rate g2) {
    Disparity d;
    d.rate_name = std::move(name);
    d.group1 = g1;
    d.group2 = g2;
    d.defined = g1.defined() && g2.defined();
    if (d.defined) {
        const RateDiff diff = rate_abs_diff(g1, g2);
        d.abs_diff = diff.value();
        d.exact_zero = diff.is_zero();
        d.ratio = rate_ratio(g1, g2);
    }
    return d;
}

namespace {

bool disparity_within(const Disparity& d, double eps) {
    return d.exact_zero || d.abs_diff <= eps;
}

// Combine a set of cross-group comparisons into one verdict: any defined
// disparity over epsilon fails; otherwise any missing required comparison is
// undefined; otherwise pass.
Verdict combine(const std::vector<Disparity>& ds, double eps, std::string& reason) {
    bool any_undefined = false;
    for (const auto& d : ds) {
        if (!d.defined) {
            any_undefined = true;
            continue;
        }
        if (!disparity_within(d, eps)) return Verdict::fail;
    }
    if (any_undefined) {
        reason = "at least one required rate comparison is undefined";
        return Verdict::undefined;
    }
    return Verdict::pass;
}

std::string format_edge(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

int bin_of(double value, const std::vector<double>& edges) {
    // ties at an edge go to the lower bin
    int idx = 0;
    for (double e : edges) {
        if (value > e) ++idx;
        else break;
    }
    return idx;
}

std::string bin_label(int bin, const std::vector<double>& edges) {
    if (edges.empty()) return "all";
    if (bin == 0) return "(-inf," + format_edge(edges.front()) + "]";
    if (bin == static_cast<int>(edges.size()))
        return "(" + format_edge(edges.back()) + ",+inf)";
    return "(" + format_edge(edges[bin - 1]) + "," + format_edge(edges[bin]) + "]";
}

struct GroupSplit {
    std::vector<const DecisionRecord*> g1, g2;
};

GroupSplit split(const Dataset& ds) {
    require_binary_sensitive(ds.schema);
    GroupSplit s;
    for (const auto& rec : ds.records) {
        if (rec.sensitive == ds.schema.sensitive_values[0])
            s.g1.push_back(&rec);
        else
            s.g2.push_back(&rec);
    }
    return s;
}

Rate acceptance_rate(const std::vector<const DecisionRecord*>& group) {
    Rate r{0, static_cast<std::int64_t>(group.size())};
    for (const auto* rec : group) r.num += rec->predicted;
    return r;
}

void require_targets(const Dataset& ds) {
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        if (!ds.records[i].target) throw errors::missing_target(i);
}

struct StratumCounts {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t positives() const { return tp + fn; }  // Y=1
    std::int64_t negatives() const { return fp + tn; }  // Y=0
    std::int64_t accepted() const { return tp + fp; }   // R=1
    std::int64_t rejected() const { return fn + tn; }   // R=0
};

StratumCounts count_strata(const std::vector<const DecisionRecord*>& group) {
    StratumCounts c;
    for (const auto* rec : group) {
        if (rec->predicted == 1)
            (*rec->target == 1 ? c.tp : c.fp)++;
        else
            (*rec->target == 1 ? c.fn : c.tn)++;
    }
    return c;
}

}  // namespace

void BinningSpec::validate() const {
    switch (strategy) {
        case BinningStrategy::explicit_edges:
            if (edges.empty())
                throw AuditError("InvalidArgument", "explicit_edges requires at least one edge");
            for (std::size_t i = 1; i < edges.size(); ++i)
                if (!(edges[i - 1] < edges[i]))
                    throw AuditError("InvalidArgument", "edges must be strictly increasing");
            break;
        case BinningStrategy::quantile:
        case BinningStrategy::equal_width:
            if (k < 2) throw AuditError("InvalidArgument", "bin count k must be >= 2");
            break;
    }
}

Discretization discretize(const std::vector<double>& values, const BinningSpec& spec) {
    spec.validate();
    if (values.empty()) throw AuditError("InvalidArgument", "discretize: no values");

    Discretization out;
    if (spec.strategy == BinningStrategy::explicit_edges) {
        out.edges = spec.edges;
    } else {
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t distinct =
            static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        if (distinct < static_cast<std::size_t>(spec.k))
            throw AuditError("DegenerateBins",
                             "cannot form " + std::to_string(spec.k) + " bins from " +
                                 std::to_string(distinct) + " distinct values");
        sorted = values;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        if (spec.strategy == BinningStrategy::quantile) {
            for (int i = 1; i < spec.k; ++i) {
                const std::size_t pos = n * static_cast<std::size_t>(i) / spec.k;
                const double e = sorted[pos == 0 ? 0 : pos - 1];
                if (out.edges.empty() || out.edges.back() < e) out.edges.push_back(e);
            }
        } else {
            const double lo = sorted.front(), hi = sorted.back();
            for (int i = 1; i < spec.k; ++i) {
                const double e = lo + (hi - lo) * i / spec.k;
                if (out.edges.empty() || out.edges.back() < e) out.edges.push_back(e);
            }
        }
    }
    out.bin_count = static_cast<int>(out.edges.size()) + 1;
    out.assignment.reserve(values.size());
    for (double v : values) out.assignment.push_back(bin_of(v, out.edges));
    return out;
}

GroupMetricResult independence(const Dataset& ds, const Tolerance& tol) {
    tol.validate();
    const GroupSplit s = split(ds);

    GroupMetricResult res;
    res.measure = Measure::independence;
    for (std::size_t g = 0; g < 2; ++g) {
        const auto& group = g == 0 ? s.g1 : s.g2;
        if (static_cast<std::int64_t>(group.size()) < tol.min_cell) {
            res.verdict = Verdict::undefined;
            res.reason = "group '" + ds.schema.sensitive_values[g] + "' has " +
                         std::to_string(group.size()) + " records (< min_cell)";
            return res;
        }
    }
    res.disparities.push_back(
        make_disparity("acceptance_rate", acceptance_rate(s.g1), acceptance_rate(s.g2)));
    res.verdict = combine(res.disparities, tol.epsilon, res.reason);
    return res;
}

GroupMetricResult conditional_independence(const Dataset& ds,
                                           const std::vector<std::string>& condition_attrs,
                                           const BinningSpec& spec, const Tolerance& tol) {
    tol.validate();
    require_binary_sensitive(ds.schema);

    // Per-record cell key, built attribute by attribute.
    std::vector<std::string> keys(ds.records.size(), "");
    for (const auto& attr : condition_attrs) {
        const FeatureDef* def = ds.schema.find_feature(attr);
        if (!def)
            throw AuditError("MissingColumn", "condition attribute '" + attr + "' not in schema");
        if (def->kind == FeatureKind::numeric) {
            std::vector<double> vals;
            vals.reserve(ds.records.size());
            for (const auto& rec : ds.records) vals.push_back(std::get<double>(rec.features.at(attr)));
            std::vector<double> edges;
            if (!vals.empty()) {
                const Discretization d = discretize(vals, spec);
                edges = d.edges;
                for (std::size_t i = 0; i < keys.size(); ++i) {
                    if (!keys[i].empty()) keys[i] += ";";
                    keys[i] += attr + "=" + bin_label(d.assignment[i], edges);
                }
            }
        } else {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                const Value& v = ds.records[i].features.at(attr);
                std::string label = std::holds_alternative<double>(v)
                                        ? (std::get<double>(v) != 0.0 ? "1" : "0")
                                        : std::get<std::string>(v);
                if (!keys[i].empty()) keys[i] += ";";
                keys[i] += attr + "=" + label;
            }
        }
    }
    for (auto& k : keys)
        if (k.empty()) k = "all";

    // std::map keeps cells in deterministic key order.
    std::map<std::string, std::pair<std::vector<const DecisionRecord*>,
                                    std::vector<const DecisionRecord*>>>
        cells;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        auto& cell = cells[keys[i]];
        if (ds.records[i].sensitive == ds.schema.sensitive_values[0])
            cell.first.push_back(&ds.records[i]);
        else
            cell.second.push_back(&ds.records[i]);
    }

    GroupMetricResult res;
    res.measure = Measure::conditional_independence;
    std::size_t evaluated = 0;
    bool any_fail = false;
    for (const auto& [key, groups] : cells) {
        CellResult cell;
        cell.cell_key = key;
        cell.group1_count = static_cast<std::int64_t>(groups.first.size());
        cell.group2_count = static_cast<std::int64_t>(groups.second.size());
        if (cell.group1_count < tol.min_cell || cell.group2_count < tol.min_cell) {
            cell.skipped = true;
            res.warnings.push_back("cell '" + key + "' skipped: group sizes " +
                                   std::to_string(cell.group1_count) + "/" +
                                   std::to_string(cell.group2_count) + " below min_cell");
        } else {
            ++evaluated;
            cell.disparity = make_disparity("acceptance_rate", acceptance_rate(groups.first),
                                            acceptance_rate(groups.second));
            cell.verdict =
                disparity_within(cell.disparity, tol.epsilon) ? Verdict::pass : Verdict::fail;
            if (cell.verdict == Verdict::fail) any_fail = true;
            res.disparities.push_back(cell.disparity);
            res.disparities.back().rate_name = "acceptance_rate[" + key + "]";
        }
        res.cells.push_back(std::move(cell));
    }

    if (evaluated == 0) {
        res.verdict = Verdict::undefined;
        res.reason = cells.empty() ? "no records" : "all cells below min_cell";
    } else {
        res.verdict = any_fail ? Verdict::fail : Verdict::pass;
    }
    return res;
}

GroupMetricResult separation(const Dataset& ds, const Tolerance& tol) {
    tol.validate();
    require_targets(ds);
    const GroupSplit s = split(ds);
    const StratumCounts c1 = count_strata(s.g1);
    const StratumCounts c2 = count_strata(s.g2);

    GroupMetricResult res;
    res.measure = Measure::separation;
    auto stratum_rate = [&](std::int64_t num, std::int64_t den) -> Rate {
        return den >= tol.min_cell ? Rate{num, den} : Rate{0, 0};
    };
    res.disparities.push_back(make_disparity("tpr", stratum_rate(c1.tp, c1.positives()),
                                             stratum_rate(c2.tp, c2.positives())));
    res.disparities.push_back(make_disparity("fpr", stratum_rate(c1.fp, c1.negatives()),
                                             stratum_rate(c2.fp, c2.negatives())));
    res.verdict = combine(res.disparities, tol.epsilon, res.reason);
    return res;
}

GroupMetricResult sufficiency(const Dataset& ds, const Tolerance& tol) {
    tol.validate();
    require_targets(ds);
    const GroupSplit s = split(ds);
    const StratumCounts c1 = count_strata(s.g1);
    const StratumCounts c2 = count_strata(s.g2);

    GroupMetricResult res;
    res.measure = Measure::sufficiency;
    auto stratum_rate = [&](std::int64_t num, std::int64_t den) -> Rate {
        return den >= tol.min_cell ? Rate{num, den} : Rate{0, 0};
    };
    res.disparities.push_back(make_disparity("precision", stratum_rate(c1.tp, c1.accepted()),
                                             stratum_rate(c2.tp, c2.accepted())));
    res.disparities.push_back(make_disparity("for", stratum_rate(c1.fn, c1.rejected()),
                                             stratum_rate(c2.fn, c2.rejected())));
    res.verdict = combine(res.disparities, tol.epsilon, res.reason);
    return res;
}

NegativeDominanceResult negative_dominance(const Dataset& ds, const std::string& protected_value) {
    require_binary_sensitive(ds.schema);
    const auto& vals = ds.schema.sensitive_values;
    if (protected_value != vals[0] && protected_value != vals[1])
        throw AuditError("InvalidArgument",
                         "protected value '" + protected_value + "' not a declared sensitive value");

    std::int64_t rejected = 0, rejected_protected = 0;
    std::int64_t protected_total = 0, protected_accepted = 0;
    std::int64_t accepted = 0;
    for (const auto& rec : ds.records) {
        const bool is_protected = rec.sensitive == protected_value;
        if (rec.predicted == 1) {
            ++accepted;
            if (is_protected) ++protected_accepted;
        } else {
            ++rejected;
            if (is_protected) ++rejected_protected;
        }
        if (is_protected) ++protected_total;
    }
    if (accepted == 0 || rejected == 0)
        throw AuditError("EmptyOutcomeClass",
                         accepted == 0 ? "no record has R=1" : "no record has R=0");
    if (protected_total == 0)
        throw AuditError("EmptyGroup", "protected class '" + protected_value + "' has no records");

    NegativeDominanceResult res;
    res.protected_value = protected_value;
    res.step1_ratio = Rate{rejected_protected, rejected};
    res.step2_ratio = Rate{protected_accepted, protected_total};
    // strict inequalities via cross-multiplication; ties fail
    res.step1 = 2 * rejected_protected > rejected;
    res.step2 = 2 * protected_accepted < protected_total;
    res.established = res.step1 && res.step2;
    return res;
}

}  // namespace fairaudit
