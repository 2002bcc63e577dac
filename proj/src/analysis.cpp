#include "fairaudit/analysis.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

constexpr int kMaxGroupSize = 14;
constexpr std::size_t kJointExampleCap = 8;

// |a/b - c/d| <= eps with b, d > 0; exact when the difference is zero.
bool within_eps(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, double eps) {
    const std::int64_t cross = a * d - c * b;
    const std::int64_t mag = cross < 0 ? -cross : cross;
    if (mag == 0) return true;
    return static_cast<double>(mag) <= eps * static_cast<double>(b) * static_cast<double>(d);
}

struct SearchContext {
    std::int64_t n1, n2, k1, k2;
    double eps;
    std::uint32_t g1_mask, y1_mask, y2_mask, full_mask;
    bool base_rates_equal;
};

AssignmentInfo classify(const SearchContext& c, std::uint32_t bits) {
    AssignmentInfo info;
    info.bits = bits;

    const std::int64_t acc1 = std::popcount(bits & c.g1_mask);
    const std::int64_t acc2 = std::popcount(bits & ~c.g1_mask & c.full_mask);
    const std::int64_t tp1 = std::popcount(bits & c.y1_mask);
    const std::int64_t tp2 = std::popcount(bits & c.y2_mask);
    const std::int64_t fp1 = acc1 - tp1;
    const std::int64_t fp2 = acc2 - tp2;
    const std::int64_t fn1 = c.k1 - tp1;
    const std::int64_t fn2 = c.k2 - tp2;

    info.independence = within_eps(acc1, c.n1, acc2, c.n2, c.eps);

    if (c.k1 == 0 || c.k2 == 0 || c.n1 - c.k1 == 0 || c.n2 - c.k2 == 0) {
        info.separation = true;
        info.separation_vacuous = true;
    } else {
        info.separation = within_eps(tp1, c.k1, tp2, c.k2, c.eps) &&
                          within_eps(fp1, c.n1 - c.k1, fp2, c.n2 - c.k2, c.eps);
    }

    if (acc1 == 0 || acc2 == 0 || acc1 == c.n1 || acc2 == c.n2) {
        info.sufficiency = true;
        info.sufficiency_vacuous = true;
    } else {
        info.sufficiency = within_eps(tp1, acc1, tp2, acc2, c.eps) &&
                           within_eps(fn1, c.n1 - acc1, fn2, c.n2 - acc2, c.eps);
    }

    info.constant = bits == 0 || bits == c.full_mask;
    info.perfect = bits == (c.y1_mask | c.y2_mask);
    info.degenerate = info.constant || info.perfect || c.base_rates_equal;
    return info;
}

SearchContext make_context(const ExclusivityParams& p) {
    if (p.n1 < 1 || p.n2 < 1)
        throw AuditError("InvalidArgument", "group sizes must be positive");
    if (p.n1 > kMaxGroupSize || p.n2 > kMaxGroupSize)
        throw AuditError("TooLarge", "group sizes beyond " + std::to_string(kMaxGroupSize) +
                                         " make exhaustive enumeration infeasible");
    auto positives = [](const Fraction& q, int n) -> std::int64_t {
        if (q.den <= 0) throw AuditError("InvalidArgument", "base rate denominator must be positive");
        if (q.num < 0 || q.num > q.den)
            throw AuditError("InvalidArgument", "base rate must be in [0,1]");
        const std::int64_t scaled = q.num * n;
        if (scaled % q.den != 0)
            throw AuditError("InvalidArgument", "base rate times group size must be integral");
        return scaled / q.den;
    };

    SearchContext c;
    c.n1 = p.n1;
    c.n2 = p.n2;
    c.k1 = positives(p.q1, p.n1);
    c.k2 = positives(p.q2, p.n2);
    c.eps = p.eps;
    c.g1_mask = (1u << p.n1) - 1u;
    c.y1_mask = (1u << c.k1) - 1u;
    c.y2_mask = ((1u << c.k2) - 1u) << p.n1;
    c.full_mask = (p.n1 + p.n2 == 32) ? 0xffffffffu : (1u << (p.n1 + p.n2)) - 1u;
    c.base_rates_equal = p.q1.num * p.q2.den == p.q2.num * p.q1.den;
    return c;
}

}  // namespace

AssignmentInfo classify_assignment(const ExclusivityParams& params, std::uint32_t bits) {
    return classify(make_context(params), bits);
}

SearchOutcome exclusivity_witness_search(const ExclusivityParams& params) {
    const SearchContext c = make_context(params);

    SearchOutcome out;
    out.params = params;
    out.k1 = c.k1;
    out.k2 = c.k2;
    out.base_rates_equal = c.base_rates_equal;
    out.total_assignments = std::uint64_t{1} << (params.n1 + params.n2);

    for (std::uint64_t bits = 0; bits < out.total_assignments; ++bits) {
        const AssignmentInfo info = classify(c, static_cast<std::uint32_t>(bits));
        if (info.independence) ++out.count_independence;
        if (info.separation) ++out.count_separation;
        if (info.sufficiency) ++out.count_sufficiency;
        if (info.independence && info.separation) {
            ++out.count_ind_sep;
            if (!out.first_ind_sep) out.first_ind_sep = info;
        }
        if (info.independence && info.sufficiency) {
            ++out.count_ind_suf;
            if (!out.first_ind_suf) out.first_ind_suf = info;
        }
        if (info.separation && info.sufficiency) {
            ++out.count_sep_suf;
            if (!out.first_sep_suf) out.first_sep_suf = info;
        }
        if (info.independence && info.separation && info.sufficiency) {
            ++out.count_joint;
            if (info.degenerate)
                ++out.count_joint_degenerate;
            else
                ++out.count_joint_nondegenerate;
            if (!out.joint_satisfier) out.joint_satisfier = info;
            if (out.joint_examples.size() < kJointExampleCap) out.joint_examples.push_back(info);
        }
    }
    return out;
}

std::vector<ProxyAssociation> proxy_scan(const Dataset& ds, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw AuditError("InvalidArgument", "threshold must be in [0,1]");
    require_binary_sensitive(ds.schema);
    if (ds.records.size() < 2)
        throw AuditError("InvalidArgument", "proxy scan needs at least 2 records");

    std::vector<int> group;
    group.reserve(ds.records.size());
    for (const auto& rec : ds.records)
        group.push_back(rec.sensitive == ds.schema.sensitive_values[0] ? 0 : 1);
    if (std::all_of(group.begin(), group.end(), [&](int g) { return g == group[0]; }))
        throw AuditError("OneGroupOnly", "both sensitive groups are required");

    const double n = static_cast<double>(ds.records.size());
    std::vector<ProxyAssociation> out;
    for (const auto& def : ds.schema.features) {
        double assoc = 0.0;
        if (def.kind == FeatureKind::numeric) {
            // absolute rank correlation with group membership
            std::vector<std::size_t> idx(ds.records.size());
            std::iota(idx.begin(), idx.end(), 0u);
            auto value_at = [&](std::size_t i) {
                return std::get<double>(ds.records[i].features.at(def.name));
            };
            std::sort(idx.begin(), idx.end(),
                      [&](std::size_t a, std::size_t b) { return value_at(a) < value_at(b); });
            std::vector<double> rank(ds.records.size(), 0.0);
            std::size_t i = 0;
            while (i < idx.size()) {
                std::size_t j = i;
                while (j + 1 < idx.size() && value_at(idx[j + 1]) == value_at(idx[i])) ++j;
                const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
                for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = avg;
                i = j + 1;
            }
            double mr = 0.0, mg = 0.0;
            for (std::size_t t = 0; t < rank.size(); ++t) {
                mr += rank[t];
                mg += group[t];
            }
            mr /= n;
            mg /= n;
            double cov = 0.0, vr = 0.0, vg = 0.0;
            for (std::size_t t = 0; t < rank.size(); ++t) {
                cov += (rank[t] - mr) * (group[t] - mg);
                vr += (rank[t] - mr) * (rank[t] - mr);
                vg += (group[t] - mg) * (group[t] - mg);
            }
            assoc = (vr > 0.0 && vg > 0.0) ? std::abs(cov / std::sqrt(vr * vg)) : 0.0;
        } else {
            // Cramer's V for the 2 x c contingency table
            std::map<std::string, std::array<double, 2>> table;
            for (std::size_t t = 0; t < ds.records.size(); ++t) {
                const Value& v = ds.records[t].features.at(def.name);
                const std::string key = std::holds_alternative<double>(v)
                                            ? (std::get<double>(v) != 0.0 ? "1" : "0")
                                            : std::get<std::string>(v);
                table[key][static_cast<std::size_t>(group[t])] += 1.0;
            }
            if (table.size() >= 2) {
                double row[2] = {0.0, 0.0};
                for (const auto& [key, cells] : table) {
                    row[0] += cells[0];
                    row[1] += cells[1];
                }
                double chi2 = 0.0;
                for (const auto& [key, cells] : table) {
                    const double col = cells[0] + cells[1];
                    for (int gidx = 0; gidx < 2; ++gidx) {
                        const double expected = row[gidx] * col / n;
                        const double diff = cells[static_cast<std::size_t>(gidx)] - expected;
                        chi2 += diff * diff / expected;
                    }
                }
                assoc = std::sqrt(chi2 / n);  // min(rows-1, cols-1) = 1
            }
        }
        assoc = std::min(1.0, std::max(0.0, assoc));
        out.push_back({def.name, assoc, assoc >= threshold});
    }
    return out;
}

namespace {

const char* const kMeasureOrder[] = {
    "independence", "conditional_independence", "separation",    "sufficiency",
    "negative_dominance", "individual",          "counterfactual", "proxy_scan",
};

int measure_order_index(const std::string& name) {
    int i = 0;
    for (const char* m : kMeasureOrder) {
        if (name == m) return i;
        ++i;
    }
    throw AuditError("InvalidArgument", "unknown measure '" + name + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

ordered_json rate_json(const Rate& r) {
    if (!r.defined()) return nullptr;
    ordered_json j;
    j["num"] = r.num;
    j["den"] = r.den;
    j["value"] = r.value();
    return j;
}

ordered_json disparity_json(const Disparity& d) {
    ordered_json j;
    j["rate"] = d.rate_name;
    j["group1"] = rate_json(d.group1);
    j["group2"] = rate_json(d.group2);
    if (d.defined) {
        j["abs_diff"] = d.exact_zero ? 0.0 : d.abs_diff;
        j["ratio"] = d.ratio;
    } else {
        j["abs_diff"] = nullptr;
        j["ratio"] = nullptr;
    }
    return j;
}

}  // namespace

MeasureResult as_measure_result(const GroupMetricResult& r) {
    MeasureResult m;
    m.measure = to_string(r.measure);
    m.verdict = r.verdict;
    ordered_json detail;
    detail["disparities"] = ordered_json::array();
    for (const auto& d : r.disparities) detail["disparities"].push_back(disparity_json(d));
    if (!r.reason.empty()) detail["reason"] = r.reason;
    if (!r.cells.empty()) {
        detail["cells"] = ordered_json::array();
        for (const auto& cell : r.cells) {
            ordered_json c;
            c["key"] = cell.cell_key;
            c["group1_count"] = cell.group1_count;
            c["group2_count"] = cell.group2_count;
            if (cell.skipped) {
                c["skipped"] = true;
            } else {
                c["verdict"] = to_string(cell.verdict);
                c["disparity"] = disparity_json(cell.disparity);
            }
            detail["cells"].push_back(std::move(c));
        }
    }
    if (!r.warnings.empty()) detail["warnings"] = r.warnings;
    m.detail = std::move(detail);
    return m;
}

MeasureResult as_measure_result(const NegativeDominanceResult& r) {
    MeasureResult m;
    m.measure = "negative_dominance";
    m.verdict = r.established ? Verdict::fail : Verdict::pass;
    ordered_json detail;
    detail["protected_value"] = r.protected_value;
    detail["step1_protected_share_of_rejected"] = rate_json(r.step1_ratio);
    detail["step1_majority"] = r.step1;
    detail["step2_accepted_share_of_protected"] = rate_json(r.step2_ratio);
    detail["step2_minority"] = r.step2;
    detail["established"] = r.established;
    m.detail = std::move(detail);
    return m;
}

MeasureResult as_measure_result(const ViolationList& r) {
    MeasureResult m;
    m.measure = "individual";
    m.verdict = r.verdict;
    ordered_json detail;
    detail["pairs_checked"] = r.pairs_checked;
    detail["violations"] = ordered_json::array();
    for (const auto& p : r.pairs) {
        ordered_json v;
        v["i"] = p.i;
        v["j"] = p.j;
        v["d"] = p.d;
        v["D"] = p.D;
        v["excess"] = p.excess;
        detail["violations"].push_back(std::move(v));
    }
    m.detail = std::move(detail);
    return m;
}

MeasureResult as_measure_result(const CFResult& r) {
    MeasureResult m;
    m.measure = "counterfactual";
    m.verdict = r.verdict;
    ordered_json detail;
    detail["records"] = r.per_record.size();
    detail["mean_delta"] = r.mean_delta;
    detail["max_delta"] = r.max_delta;
    detail["tau"] = r.tau;
    detail["aggregate"] = to_string(r.aggregate);
    m.detail = std::move(detail);
    return m;
}

MeasureResult as_measure_result(const std::vector<ProxyAssociation>& r) {
    MeasureResult m;
    m.measure = "proxy_scan";
    bool any = false;
    ordered_json feats = ordered_json::array();
    for (const auto& p : r) {
        any = any || p.flagged;
        ordered_json f;
        f["feature"] = p.feature;
        f["association"] = p.association;
        f["flagged"] = p.flagged;
        feats.push_back(std::move(f));
    }
    m.verdict = any ? Verdict::fail : Verdict::pass;
    m.detail["features"] = std::move(feats);
    return m;
}

namespace {

ordered_json assignment_json(const AssignmentInfo& a, int n1, int n2) {
    ordered_json j;
    std::string pattern;
    for (int i = 0; i < n1 + n2; ++i) {
        if (i == n1) pattern += '|';
        pattern += (a.bits >> i) & 1u ? '1' : '0';
    }
    j["assignment"] = pattern;
    j["independence"] = a.independence;
    j["separation"] = a.separation;
    j["sufficiency"] = a.sufficiency;
    if (a.separation_vacuous) j["separation_vacuous"] = true;
    if (a.sufficiency_vacuous) j["sufficiency_vacuous"] = true;
    j["constant"] = a.constant;
    j["perfect"] = a.perfect;
    j["degenerate"] = a.degenerate;
    return j;
}

}  // namespace

ordered_json to_json(const SearchOutcome& o) {
    ordered_json j;
    j["n1"] = o.params.n1;
    j["n2"] = o.params.n2;
    j["q1"] = fmt_double(o.params.q1.value());
    j["q2"] = fmt_double(o.params.q2.value());
    j["positives1"] = o.k1;
    j["positives2"] = o.k2;
    j["eps"] = o.params.eps;
    j["base_rates_equal"] = o.base_rates_equal;
    j["total_assignments"] = o.total_assignments;
    j["satisfying"] = {{"independence", o.count_independence},
                       {"separation", o.count_separation},
                       {"sufficiency", o.count_sufficiency},
                       {"independence+separation", o.count_ind_sep},
                       {"independence+sufficiency", o.count_ind_suf},
                       {"separation+sufficiency", o.count_sep_suf},
                       {"all_three", o.count_joint}};
    j["all_three_degenerate"] = o.count_joint_degenerate;
    j["all_three_nondegenerate"] = o.count_joint_nondegenerate;
    auto opt = [&](const std::optional<AssignmentInfo>& a) -> ordered_json {
        if (!a) return nullptr;
        return assignment_json(*a, o.params.n1, o.params.n2);
    };
    j["joint_satisfier"] = opt(o.joint_satisfier);
    j["first_independence_separation"] = opt(o.first_ind_sep);
    j["first_independence_sufficiency"] = opt(o.first_ind_suf);
    j["first_separation_sufficiency"] = opt(o.first_sep_suf);
    ordered_json examples = ordered_json::array();
    for (const auto& a : o.joint_examples)
        examples.push_back(assignment_json(a, o.params.n1, o.params.n2));
    j["joint_examples"] = std::move(examples);
    return j;
}

std::string search_outcome_text(const SearchOutcome& o) {
    std::ostringstream s;
    s << "exclusivity search: n1=" << o.params.n1 << " (positives " << o.k1 << "), n2="
      << o.params.n2 << " (positives " << o.k2 << "), eps=" << fmt_double(o.params.eps) << "\n";
    s << "assignments enumerated: " << o.total_assignments << "\n";
    s << "  independence:              " << o.count_independence << "\n";
    s << "  separation:                " << o.count_separation << "\n";
    s << "  sufficiency:               " << o.count_sufficiency << "\n";
    s << "  independence+separation:   " << o.count_ind_sep << "\n";
    s << "  independence+sufficiency:  " << o.count_ind_suf << "\n";
    s << "  separation+sufficiency:    " << o.count_sep_suf << "\n";
    s << "  all three:                 " << o.count_joint << " (degenerate "
      << o.count_joint_degenerate << ", non-degenerate " << o.count_joint_nondegenerate << ")\n";
    auto show = [&](const char* label, const std::optional<AssignmentInfo>& a) {
        if (!a) return;
        std::string pattern;
        for (int i = 0; i < o.params.n1 + o.params.n2; ++i) {
            if (i == o.params.n1) pattern += '|';
            pattern += (a->bits >> i) & 1u ? '1' : '0';
        }
        s << "  " << label << ": R=" << pattern;
        if (a->constant) s << " [constant]";
        if (a->perfect) s << " [perfect]";
        if (a->separation_vacuous || a->sufficiency_vacuous) s << " [vacuous rates]";
        s << "\n";
    };
    show("first joint satisfier", o.joint_satisfier);
    show("first independence+separation", o.first_ind_sep);
    show("first independence+sufficiency", o.first_ind_suf);
    show("first separation+sufficiency", o.first_sep_suf);
    return s.str();
}

AuditReport assemble_report(const std::string& dataset_digest, std::int64_t record_count,
                            ordered_json config_snapshot, std::vector<MeasureResult> results,
                            std::vector<std::string> warnings) {
    if (results.empty())
        throw AuditError("InvalidArgument", "report needs at least one measure result");
    std::set<std::string> seen;
    for (const auto& r : results) {
        measure_order_index(r.measure);
        if (!seen.insert(r.measure).second)
            throw AuditError("DuplicateMeasure", "measure '" + r.measure + "' appears twice");
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const MeasureResult& a, const MeasureResult& b) {
                         return measure_order_index(a.measure) < measure_order_index(b.measure);
                     });

    AuditReport report;
    report.tool_version = kToolVersion;
    report.dataset_digest = dataset_digest;
    report.record_count = record_count;
    report.config_snapshot = std::move(config_snapshot);
    report.results = std::move(results);
    report.warnings = std::move(warnings);
    return report;
}

ordered_json report_to_json(const AuditReport& report) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = report.tool_version;
    j["dataset"] = {{"digest", report.dataset_digest}, {"records", report.record_count}};
    j["config"] = report.config_snapshot;
    j["results"] = ordered_json::array();
    for (const auto& r : report.results) {
        ordered_json e;
        e["measure"] = r.measure;
        e["verdict"] = to_string(r.verdict);
        e["detail"] = r.detail;
        j["results"].push_back(std::move(e));
    }
    j["warnings"] = report.warnings;
    j["overall"] = to_string(overall_verdict(report));
    return j;
}

std::string report_summary(const AuditReport& report) {
    std::ostringstream s;
    s << kToolName << " " << report.tool_version << "\n";
    s << "dataset " << report.dataset_digest << " (" << report.record_count << " records)\n";
    for (const auto& r : report.results) {
        s << "  " << r.measure << ": " << to_string(r.verdict);
        if (r.detail.contains("disparities")) {
            for (const auto& d : r.detail["disparities"]) {
                if (!d["abs_diff"].is_null())
                    s << "  " << d["rate"].get<std::string>() << " diff "
                      << fmt_double(d["abs_diff"].get<double>());
            }
        }
        if (r.detail.contains("reason")) s << "  (" << r.detail["reason"].get<std::string>() << ")";
        s << "\n";
    }
    for (const auto& w : report.warnings) s << "  warning: " << w << "\n";
    s << "overall: " << to_string(overall_verdict(report)) << "\n";
    return s.str();
}

Verdict overall_verdict(const AuditReport& report) {
    bool any_undefined = false;
    for (const auto& r : report.results) {
        if (r.verdict == Verdict::fail) return Verdict::fail;
        if (r.verdict == Verdict::undefined) any_undefined = true;
    }
    return any_undefined ? Verdict::undefined : Verdict::pass;
}

}  // namespace fairaudit
