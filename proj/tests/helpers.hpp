#pragma once

#include <random>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace testutil {

using namespace fairaudit;

inline Schema basic_schema(bool with_target = true, bool with_gpa = false) {
    Schema s;
    if (with_gpa) s.features.push_back({"gpa", FeatureKind::numeric});
    s.sensitive_attr = "gender";
    s.sensitive_values = {"f", "m"};
    s.predicted_col = "predicted";
    if (with_target) s.target_col = "target";
    return s;
}

inline DecisionRecord rec(const std::string& sensitive, int predicted, int target) {
    DecisionRecord r;
    r.sensitive = sensitive;
    r.predicted = predicted;
    r.target = target;
    return r;
}

inline DecisionRecord rec_nt(const std::string& sensitive, int predicted) {
    DecisionRecord r;
    r.sensitive = sensitive;
    r.predicted = predicted;
    return r;
}

// counts: per group, (total, qualified, accepted-of-qualified, accepted-of-unqualified)
struct GroupCounts {
    int total = 0;
    int qualified = 0;
    int accepted_qualified = 0;
    int accepted_unqualified = 0;
};

inline Dataset dataset_from_counts(const GroupCounts& g1, const GroupCounts& g2) {
    Dataset ds;
    ds.schema = basic_schema(true);
    auto add = [&](const std::string& sens, const GroupCounts& g) {
        for (int i = 0; i < g.qualified; ++i)
            ds.records.push_back(rec(sens, i < g.accepted_qualified ? 1 : 0, 1));
        const int unqualified = g.total - g.qualified;
        for (int i = 0; i < unqualified; ++i)
            ds.records.push_back(rec(sens, i < g.accepted_unqualified ? 1 : 0, 0));
    };
    add("f", g1);
    add("m", g2);
    return ds;
}

inline Dataset random_labelled_dataset(std::mt19937& rng, int max_records = 12) {
    std::uniform_int_distribution<int> size_dist(2, max_records);
    std::uniform_int_distribution<int> bit(0, 1);
    Dataset ds;
    ds.schema = basic_schema(true);
    const int n = size_dist(rng);
    for (int i = 0; i < n; ++i)
        ds.records.push_back(rec(bit(rng) ? "f" : "m", bit(rng), bit(rng)));
    return ds;
}

// swaps the declared order of the sensitive values
inline Dataset swap_groups(Dataset ds) {
    std::swap(ds.schema.sensitive_values[0], ds.schema.sensitive_values[1]);
    return ds;
}

}  // namespace testutil
