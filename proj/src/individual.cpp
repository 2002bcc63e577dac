#include "fairaudit/individual.hpp"

#include <algorithm>
#include <cmath>

namespace fairaudit {

void DistanceConfig::validate() const {
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
        throw AuditError("InvalidArgument", "lipschitz constant must be positive and finite");
    for (const auto& [name, w] : feature_weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw AuditError("InvalidArgument", "weight for '" + name + "' must be finite and >= 0");
    }
}

ScalingStats compute_scaling_stats(const Dataset& ds) {
    ScalingStats stats;
    for (const auto& def : ds.schema.features) {
        if (def.kind != FeatureKind::numeric) continue;
        ScalingStats::FeatureStats fs;
        double sum = 0.0, sumsq = 0.0;
        bool first = true;
        for (const auto& rec : ds.records) {
            const double v = std::get<double>(rec.features.at(def.name));
            if (first) {
                fs.min = fs.max = v;
                first = false;
            } else {
                fs.min = std::min(fs.min, v);
                fs.max = std::max(fs.max, v);
            }
            sum += v;
            sumsq += v * v;
        }
        const double n = static_cast<double>(ds.records.size());
        if (n > 0) {
            fs.mean = sum / n;
            const double var = std::max(0.0, sumsq / n - fs.mean * fs.mean);
            fs.sd = std::sqrt(var);
        }
        stats.numeric[def.name] = fs;
    }
    return stats;
}

namespace {

struct WeightedFeature {
    std::string name;
    FeatureKind kind;
    double weight;
    bool is_sensitive;
};

// Resolve the participating features and their weights; throws UnknownFeature
// for weights naming absent features.
std::vector<WeightedFeature> resolve_features(const DistanceConfig& cfg, const Schema& schema) {
    cfg.validate();
    std::vector<WeightedFeature> out;
    auto weight_of = [&](const std::string& name) {
        auto it = cfg.feature_weights.find(name);
        return it == cfg.feature_weights.end() ? 1.0 : it->second;
    };
    for (const auto& def : schema.features)
        out.push_back({def.name, def.kind, weight_of(def.name), false});
    if (cfg.include_sensitive)
        out.push_back({schema.sensitive_attr, FeatureKind::categorical,
                       weight_of(schema.sensitive_attr), true});

    for (const auto& [name, w] : cfg.feature_weights) {
        (void)w;
        const bool known = std::any_of(out.begin(), out.end(),
                                       [&](const WeightedFeature& f) { return f.name == name; });
        if (!known)
            throw AuditError("UnknownFeature", "weight refers to absent feature '" + name + "'");
    }

    double total = 0.0;
    for (const auto& f : out) total += f.weight;
    if (!(total > 0.0))
        throw AuditError("InvalidArgument", "no feature with positive weight participates in d");
    return out;
}

double numeric_feature_distance(double a, double b, NumericScaling scaling,
                                const ScalingStats::FeatureStats& fs) {
    switch (scaling) {
        case NumericScaling::minmax: {
            const double range = fs.max - fs.min;
            if (range <= 0.0) return 0.0;
            return std::abs(a - b) / range;
        }
        case NumericScaling::zscore: {
            if (fs.sd <= 0.0) return 0.0;
            // z-difference clamped so each feature stays in [0,1]
            return std::min(1.0, std::abs(a - b) / fs.sd);
        }
    }
    return 0.0;
}

double distance_resolved(const DecisionRecord& r1, const DecisionRecord& r2,
                         const std::vector<WeightedFeature>& feats, const DistanceConfig& cfg,
                         const ScalingStats& stats) {
    double acc = 0.0, total_weight = 0.0;
    for (const auto& f : feats) {
        total_weight += f.weight;
        if (f.weight == 0.0) continue;
        double dist = 0.0;
        if (f.is_sensitive) {
            dist = r1.sensitive == r2.sensitive ? 0.0 : 1.0;
        } else if (f.kind == FeatureKind::numeric) {
            dist = numeric_feature_distance(std::get<double>(r1.features.at(f.name)),
                                            std::get<double>(r2.features.at(f.name)),
                                            cfg.numeric_scaling, stats.numeric.at(f.name));
        } else {
            dist = r1.features.at(f.name) == r2.features.at(f.name) ? 0.0 : 1.0;
        }
        acc += f.weight * dist;
    }
    return acc / total_weight;
}

}  // namespace

double feature_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                        const DistanceConfig& cfg, const Schema& schema,
                        const ScalingStats& stats) {
    return distance_resolved(r1, r2, resolve_features(cfg, schema), cfg, stats);
}

double feature_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                        const DistanceConfig& cfg, const Dataset& ds) {
    return feature_distance(r1, r2, cfg, ds.schema, compute_scaling_stats(ds));
}

double output_distance(const DecisionRecord& r1, const DecisionRecord& r2,
                       const DistanceConfig& cfg) {
    if (cfg.output_mode == OutputMode::score) {
        if (!r1.score || !r2.score)
            throw AuditError("MissingScore", "score output mode requires scores on both records");
        return std::abs(*r1.score - *r2.score);
    }
    return std::abs(r1.predicted - r2.predicted);
}

ViolationList individual_fairness_audit(const Dataset& ds, const DistanceConfig& cfg) {
    if (ds.records.size() < 2)
        throw AuditError("InvalidArgument", "individual fairness audit needs at least 2 records");
    const auto feats = resolve_features(cfg, ds.schema);
    const ScalingStats stats = compute_scaling_stats(ds);

    ViolationList out;
    const std::size_t n = ds.records.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ++out.pairs_checked;
            const double d = distance_resolved(ds.records[i], ds.records[j], feats, cfg, stats);
            const double D = output_distance(ds.records[i], ds.records[j], cfg);
            const double excess = D - cfg.lipschitz * d;
            if (excess > 0.0) out.pairs.push_back({i, j, d, D, excess});
        }
    }
    std::stable_sort(out.pairs.begin(), out.pairs.end(),
                     [](const PairViolation& a, const PairViolation& b) {
                         if (a.excess != b.excess) return a.excess > b.excess;
                         if (a.i != b.i) return a.i < b.i;
                         return a.j < b.j;
                     });
    out.verdict = out.pairs.empty() ? Verdict::pass : Verdict::fail;
    return out;
}

}  // namespace fairaudit
