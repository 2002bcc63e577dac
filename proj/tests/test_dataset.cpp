#include "doctest.h"

#include <algorithm>
#include <random>

#include "fairaudit/dataset.hpp"
#include "helpers.hpp"

using namespace fairaudit;
using namespace testutil;

namespace {

const char* kThreeRowCsv =
    "gender,gpa,predicted,target\n"
    "f,3.5,1,1\n"
    "m,2.25,0,0\n"
    "m,3,1,0\n";

}  // namespace

TEST_CASE("parse_dataset: header-only input yields an empty dataset") {
    const Dataset ds = parse_dataset("gender,predicted,target\n", basic_schema(true));
    CHECK(ds.records.empty());
}

TEST_CASE("parse_dataset: three-row hand-checked round trip") {
    const Dataset ds = parse_dataset(kThreeRowCsv, basic_schema(true, true));
    REQUIRE(ds.records.size() == 3);
    CHECK(ds.records[0].sensitive == "f");
    CHECK(std::get<double>(ds.records[0].features.at("gpa")) == 3.5);
    CHECK(ds.records[0].predicted == 1);
    CHECK(ds.records[0].target == 1);
    CHECK(std::get<double>(ds.records[1].features.at("gpa")) == 2.25);
    CHECK(ds.records[2].predicted == 1);
    CHECK(ds.records[2].target == 0);
}

TEST_CASE("parse_dataset: sensitive value outside the declared domain") {
    CHECK_THROWS_WITH_AS(
        parse_dataset("gender,predicted,target\nx,1,1\n", basic_schema(true)),
        doctest::Contains("gender"), AuditError);
    try {
        parse_dataset("gender,predicted,target\nf,1,1\nx,0,0\n", basic_schema(true));
        FAIL("expected BadValue");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "BadValue");
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("parse_dataset: missing column and unparseable values") {
    try {
        parse_dataset("gender,predicted\nf,1\n", basic_schema(true));
        FAIL("expected MissingColumn");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "MissingColumn");
    }
    try {
        parse_dataset("gender,gpa,predicted,target\nf,notanumber,1,1\n", basic_schema(true, true));
        FAIL("expected BadValue");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "BadValue");
        CHECK(std::string(e.what()).find("gpa") != std::string::npos);
    }
}

TEST_CASE("parse_dataset: configured class labels map onto 0/1") {
    Schema s = basic_schema(true);
    s.positive_label = "accepted";
    s.negative_label = "rejected";
    const Dataset ds =
        parse_dataset("gender,predicted,target\nf,accepted,rejected\nm,0,1\n", s);
    REQUIRE(ds.records.size() == 2);
    CHECK(ds.records[0].predicted == 1);
    CHECK(ds.records[0].target == 0);
    CHECK(ds.records[1].predicted == 0);
    CHECK(ds.records[1].target == 1);
}

TEST_CASE("parse_dataset: scores outside [0,1] rejected") {
    Schema s = basic_schema(false);
    s.score_col = "score";
    CHECK_THROWS_AS(parse_dataset("gender,predicted,score\nf,1,1.5\n", s), AuditError);
    const Dataset ds = parse_dataset("gender,predicted,score\nf,1,0.75\n", s);
    CHECK(ds.records[0].score == 0.75);
}

TEST_CASE("partition_by_sensitive: 10 women and 30 men split as (10, 30)") {
    Dataset ds;
    ds.schema = basic_schema(true);
    for (int i = 0; i < 10; ++i) ds.records.push_back(rec("f", 0, 0));
    for (int i = 0; i < 30; ++i) ds.records.push_back(rec("m", 0, 0));
    const auto [g1, g2] = partition_by_sensitive(ds);
    CHECK(g1.size() == 10);
    CHECK(g2.size() == 30);
}

TEST_CASE("partition_by_sensitive: one-sided and empty datasets") {
    Dataset ds;
    ds.schema = basic_schema(true);
    for (int i = 0; i < 5; ++i) ds.records.push_back(rec("f", 1, 1));
    auto [g1, g2] = partition_by_sensitive(ds);
    CHECK(g1.size() == 5);
    CHECK(g2.empty());

    ds.records.clear();
    auto [e1, e2] = partition_by_sensitive(ds);
    CHECK(e1.empty());
    CHECK(e2.empty());
}

TEST_CASE("confusion_matrix: one record per cell") {
    std::vector<DecisionRecord> recs = {rec("f", 1, 1), rec("f", 1, 0), rec("f", 0, 0),
                                        rec("f", 0, 1)};
    const ConfusionMatrix cm = confusion_matrix(recs);
    CHECK(cm.tp == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fn == 1);
}

TEST_CASE("confusion_matrix: fig3 women group counts") {
    // 3 qualified of whom 2 accepted, 7 unqualified none accepted
    std::vector<DecisionRecord> recs;
    for (int i = 0; i < 3; ++i) recs.push_back(rec("f", i < 2 ? 1 : 0, 1));
    for (int i = 0; i < 7; ++i) recs.push_back(rec("f", 0, 0));
    const ConfusionMatrix cm = confusion_matrix(recs);
    CHECK(cm.tp == 2);
    CHECK(cm.fp == 0);
    CHECK(cm.tn == 7);
    CHECK(cm.fn == 1);
}

TEST_CASE("confusion_matrix: empty list and missing target") {
    const ConfusionMatrix cm = confusion_matrix({});
    CHECK(cm.total() == 0);

    std::vector<DecisionRecord> recs = {rec("f", 1, 1), rec_nt("f", 0)};
    try {
        confusion_matrix(recs);
        FAIL("expected MissingTarget");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "MissingTarget");
    }
}

TEST_CASE("rates: appendix formulas on the fig3 women matrix") {
    const QualityRates r = rates({2, 0, 7, 1});
    // oracle: the appendix formulas evaluated directly on the counts
    CHECK(r.tpr == 2.0 / 3.0);
    CHECK(r.fpr == 0.0);
    CHECK(r.tnr == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.for_rate == 1.0 / 8.0);
    CHECK(r.accuracy == 9.0 / 10.0);
}

TEST_CASE("rates: zero denominators yield absent rates, never NaN") {
    const QualityRates r = rates({0, 0, 0, 0});
    CHECK(!r.accuracy);
    CHECK(!r.tpr);
    CHECK(!r.tnr);
    CHECK(!r.fpr);
    CHECK(!r.precision);
    CHECK(!r.for_rate);
}

TEST_CASE("rates: degenerate matrix with no negatives") {
    const QualityRates r = rates({3, 1, 0, 0});
    CHECK(r.precision == 3.0 / 4.0);
    CHECK(r.tpr == 1.0);
    CHECK(r.fpr == 1.0);
    CHECK(r.accuracy == 3.0 / 4.0);
    CHECK(!r.for_rate);  // fn + tn == 0
}

TEST_CASE("rates properties: complement identities on random matrices") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<std::int64_t> count(0, 500);
    for (int trial = 0; trial < 1000; ++trial) {
        const ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
        const QualityRates r = rates(cm);
        if (cm.tp + cm.fn > 0) {
            const double fnr = static_cast<double>(cm.fn) / static_cast<double>(cm.tp + cm.fn);
            CHECK(*r.tpr + fnr == doctest::Approx(1.0).epsilon(1e-12));
        }
        if (cm.fp + cm.tn > 0) CHECK(*r.fpr + *r.tnr == doctest::Approx(1.0).epsilon(1e-12));
        if (cm.total() > 0)
            CHECK(*r.accuracy ==
                  doctest::Approx(static_cast<double>(cm.tp + cm.tn) / cm.total()).epsilon(1e-12));
    }
}

TEST_CASE("partition property: the split is a bijection on records") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const Dataset ds = random_labelled_dataset(rng, 20);
        const auto [g1, g2] = partition_by_sensitive(ds);
        CHECK(g1.size() + g2.size() == ds.records.size());
        // order-preserving: the two groups interleave back into the original
        std::size_t i1 = 0, i2 = 0;
        for (const auto& r : ds.records) {
            if (r.sensitive == "f") {
                CHECK(g1[i1++] == r);
            } else {
                CHECK(g2[i2++] == r);
            }
        }
    }
}

TEST_CASE("serialize/parse round trip is the identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> gpa(0.0, 4.0);
    std::uniform_int_distribution<int> bit(0, 1);
    Schema schema = basic_schema(true, true);
    schema.features.push_back({"dept", FeatureKind::categorical});
    schema.score_col = "score";
    for (int trial = 0; trial < 20; ++trial) {
        Dataset ds;
        ds.schema = schema;
        std::uniform_int_distribution<int> size(0, 15);
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            DecisionRecord r = rec(bit(rng) ? "f" : "m", bit(rng), bit(rng));
            r.features["gpa"] = gpa(rng);
            r.features["dept"] = bit(rng) ? "r&d" : "sales, eu";  // comma exercises quoting
            r.score = gpa(rng) / 4.0;
            ds.records.push_back(std::move(r));
        }
        const Dataset back = parse_dataset(serialize_csv(ds), schema);
        REQUIRE(back.records.size() == ds.records.size());
        for (std::size_t i = 0; i < ds.records.size(); ++i) CHECK(back.records[i] == ds.records[i]);
    }
}

TEST_CASE("rates are invariant under record reordering") {
    std::mt19937 rng(21);
    const Dataset ds = random_labelled_dataset(rng, 16);
    std::vector<DecisionRecord> shuffled = ds.records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const QualityRates a = rates(confusion_matrix(ds.records));
    const QualityRates b = rates(confusion_matrix(shuffled));
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.tpr == b.tpr);
    CHECK(a.fpr == b.fpr);
    CHECK(a.precision == b.precision);
    CHECK(a.for_rate == b.for_rate);
}

TEST_CASE("require_binary_sensitive rejects wider cardinalities") {
    Schema s = basic_schema(true);
    s.sensitive_values = {"a", "b", "c"};
    try {
        require_binary_sensitive(s);
        FAIL("expected UnsupportedCardinality");
    } catch (const AuditError& e) {
        CHECK(e.kind() == "UnsupportedCardinality");
    }
}

TEST_CASE("content_digest is stable and input-sensitive") {
    CHECK(content_digest("abc") == content_digest("abc"));
    CHECK(content_digest("abc") != content_digest("abd"));
    CHECK(content_digest("").rfind("fnv1a64:", 0) == 0);
}
