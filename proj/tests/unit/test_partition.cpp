#include <doctest.h>

#include <cmath>
#include <random>

#include "hedgeql/partition.hpp"
#include "test_support.hpp"

using namespace hedgeql;
using hedgeql::testing::LeafScanOracle;
using hedgeql::testing::random_config;
using hedgeql::testing::rectangle_algebra;

namespace {

Term make_term(const ValidatedAlgebra& alg, const std::string& text) {
    return std::get<Term>(parse_term(text, alg));
}

struct ExpectedClass {
    const char* label;
    double lower;
    double upper;
};

} // namespace

TEST_CASE("level-2 partition reproduces the published class list") {
    auto part = build_partition(rectangle_algebra(), 2);
    const ExpectedClass expected[] = {
        {"S(0)", 0.0, 7.35},
        {"S(Very short)", 7.35, 16.8},
        {"S(More short)", 26.25, 33.0},
        {"S(Possibly short)", 40.2, 45.6},
        {"S(Little short)", 52.2, 57.6},
        {"S(W)", 57.6, 61.6},
        {"S(Little long)", 61.6, 65.2},
        {"S(Possibly long)", 69.6, 73.2},
        {"S(More long)", 78.0, 82.5},
        {"S(Very long)", 88.8, 95.1},
        {"S(1)", 95.1, 100.0},
    };
    REQUIRE(part.classes().size() == 11);
    for (std::size_t i = 0; i < 11; ++i) {
        const SimilarityClass& cls = part.classes()[i];
        CHECK(part.label_text(cls) == expected[i].label);
        CHECK(std::abs(cls.interval.lower * 100.0 - expected[i].lower) < 1e-9);
        CHECK(std::abs(cls.interval.upper * 100.0 - expected[i].upper) < 1e-9);
        CHECK(cls.ordinal == static_cast<int>(i));
    }
    CHECK(part.classes().front().interval.closed_lower);
    CHECK(part.gaps().size() == 12);
}

TEST_CASE("level-1 partition covers the unit interval without gaps") {
    auto part = build_partition(rectangle_algebra(), 1);
    // hand application of the level-1 class formulas to the rectangle
    // configuration, at scale 100
    const ExpectedClass expected[] = {
        {"S(0)", 0.0, 21.0},  {"S(short)", 21.0, 48.0}, {"S(W)", 48.0, 68.0},
        {"S(long)", 68.0, 86.0}, {"S(1)", 86.0, 100.0},
    };
    REQUIRE(part.classes().size() == 5);
    CHECK(part.gaps().empty());
    for (std::size_t i = 0; i < 5; ++i) {
        const SimilarityClass& cls = part.classes()[i];
        CHECK(part.label_text(cls) == expected[i].label);
        CHECK(std::abs(cls.interval.lower * 100.0 - expected[i].lower) < 1e-9);
        CHECK(std::abs(cls.interval.upper * 100.0 - expected[i].upper) < 1e-9);
    }
}

TEST_CASE("class count follows 2(p+q)^(k-1)+3") {
    auto alg = rectangle_algebra();
    for (int k = 1; k <= 4; ++k) {
        auto part = build_partition(alg, k);
        std::size_t expected = 3 + 2 * static_cast<std::size_t>(std::pow(4, k - 1));
        CHECK(part.classes().size() == expected);
    }
}

TEST_CASE("classes and gaps tile the unit interval exactly") {
    auto alg = rectangle_algebra();
    for (int k = 1; k <= 4; ++k) {
        auto part = build_partition(alg, k);
        auto classes = part.classes();
        auto gaps = part.gaps();
        std::size_t ci = 0, gi = 0;
        double cursor = 0.0;
        while (ci < classes.size() || gi < gaps.size()) {
            const bool take_class = gi >= gaps.size() ||
                                    (ci < classes.size() &&
                                     classes[ci].interval.lower <= gaps[gi].lower);
            const FuzzyInterval& iv =
                take_class ? classes[ci++].interval : gaps[gi++];
            CHECK(iv.lower == cursor);
            cursor = iv.upper;
        }
        CHECK(cursor == 1.0);
    }
}

TEST_CASE("build_partition rejects out-of-range levels") {
    auto alg = rectangle_algebra();
    CHECK_THROWS_AS(build_partition(alg, 0), Error);
    try {
        build_partition(alg, 5);
        FAIL("expected LevelOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LevelOutOfRange);
    }
}

TEST_CASE("locate_crisp follows the boundary convention") {
    auto part = build_partition(rectangle_algebra(), 2);

    const SimilarityClass* at_53 = part.locate_crisp(0.53);
    REQUIRE(at_53 != nullptr);
    CHECK(part.label_text(*at_53) == "S(Little short)");

    CHECK(part.locate_crisp(0.50) == nullptr); // inside the (48, 52.2] gap

    // class intervals are right-closed: their own upper end belongs to them
    const double s0_upper = part.classes()[0].interval.upper; // 7.35 at scale 100
    const SimilarityClass* at_boundary = part.locate_crisp(s0_upper);
    REQUIRE(at_boundary != nullptr);
    CHECK(part.label_text(*at_boundary) == "S(0)");

    REQUIRE(part.locate_crisp(0.0) != nullptr);
    CHECK(part.label_text(*part.locate_crisp(0.0)) == "S(0)");
    REQUIRE(part.locate_crisp(1.0) != nullptr);
    CHECK(part.label_text(*part.locate_crisp(1.0)) == "S(1)");

    CHECK(part.label_text(*part.locate_crisp(part.classes()[1].interval.upper)) ==
          "S(Very short)");
    // gaps are right-closed too: the (16.8, 21] gap owns its upper end
    CHECK(part.locate_crisp(0.19) == nullptr);
    CHECK(part.locate_crisp(part.gaps()[0].upper) == nullptr);
}

TEST_CASE("neighborhood_of_term resolves by length") {
    auto alg = rectangle_algebra();
    auto part = build_partition(alg, 2);

    const SimilarityClass* little_long = part.neighborhood_of_term(make_term(*alg, "little long"));
    REQUIRE(little_long != nullptr);
    CHECK(part.label_text(*little_long) == "S(Little long)");
    CHECK(std::abs(little_long->interval.lower * 100.0 - 61.6) < 1e-9);
    CHECK(std::abs(little_long->interval.upper * 100.0 - 65.2) < 1e-9);

    // longer term: located via its representative value 0.0441
    const SimilarityClass* vv_short = part.neighborhood_of_term(make_term(*alg, "very very short"));
    REQUIRE(vv_short != nullptr);
    CHECK(part.label_text(*vv_short) == "S(0)");

    // a term whose own interval is a trimmed gap
    CHECK(part.neighborhood_of_term(make_term(*alg, "little very short")) == nullptr);
}

TEST_CASE("every direct class lookup agrees with the class list") {
    auto alg = rectangle_algebra();
    for (int k = 1; k <= 3; ++k) {
        auto part = build_partition(alg, k);
        for (const Term& t : hedgeql::testing::all_terms_of_length(*alg, k)) {
            const SimilarityClass* cls = part.neighborhood_of_term(t);
            REQUIRE(cls != nullptr);
            CHECK(std::get<Term>(cls->label) == t);
        }
    }
}

TEST_CASE("representative values are interior to their similarity class") {
    auto alg = rectangle_algebra();
    for (int k = 1; k <= 4; ++k) {
        auto part = build_partition(alg, k);
        for (const Term& t : hedgeql::testing::all_terms_of_length(*alg, k)) {
            const SimilarityClass* cls = part.neighborhood_of_term(t);
            REQUIRE(cls != nullptr);
            const double v = representative_value(*alg, t);
            CHECK(v > cls->interval.lower);
            CHECK(v < cls->interval.upper);
        }
    }
}

TEST_CASE("match_equal_level on the rectangle partition") {
    auto alg = rectangle_algebra();
    auto part = build_partition(alg, 2);
    const Term little_long = make_term(*alg, "little long");
    const Term little_short = make_term(*alg, "little short");

    CHECK(match_equal_level(part, AttrValue{0.62}, AttrValue{little_long}));
    CHECK_FALSE(match_equal_level(part, AttrValue{0.58}, AttrValue{little_long}));
    CHECK(match_equal_level(part, AttrValue{little_long}, AttrValue{little_long}));
    CHECK(match_equal_level(part, AttrValue{little_short}, AttrValue{0.53}));

    // crisp pairs: exact equality or a shared class
    CHECK(match_equal_level(part, AttrValue{0.53}, AttrValue{0.55}));  // both S(Little short)
    CHECK(match_equal_level(part, AttrValue{0.50}, AttrValue{0.50}));  // equal inside a gap
    CHECK_FALSE(match_equal_level(part, AttrValue{0.50}, AttrValue{0.51})); // gap, not equal
    CHECK_FALSE(match_equal_level(part, AttrValue{0.53}, AttrValue{0.62}));

    // terms in gaps match nothing, not even themselves
    const Term lv_short = make_term(*alg, "little very short");
    CHECK_FALSE(match_equal_level(part, AttrValue{lv_short}, AttrValue{lv_short}));
}

TEST_CASE("match_equal_level is symmetric") {
    auto alg = rectangle_algebra();
    auto part = build_partition(alg, 2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const auto terms = hedgeql::testing::all_terms_of_length(*alg, 2);
    for (int i = 0; i < 200; ++i) {
        AttrValue a, b;
        if (i % 3 == 0) a = dist(rng);
        else a = terms[static_cast<std::size_t>(rng() % terms.size())];
        if (i % 2 == 0) b = dist(rng);
        else b = terms[static_cast<std::size_t>(rng() % terms.size())];
        CHECK(match_equal_level(part, a, b) == match_equal_level(part, b, a));
    }
}

TEST_CASE("match_ge_level covers all operand combinations") {
    auto alg = rectangle_algebra();
    auto part = build_partition(alg, 2);
    const Term little_short = make_term(*alg, "little short");
    const Term little_long = make_term(*alg, "little long");
    const Term very_short = make_term(*alg, "very short");

    CHECK(match_ge_level(part, AttrValue{0.7}, AttrValue{0.5}));
    CHECK_FALSE(match_ge_level(part, AttrValue{0.5}, AttrValue{0.7}));

    // crisp against a term: strict comparison with the class lower bound
    CHECK(match_ge_level(part, AttrValue{0.62}, AttrValue{little_short})); // 0.62 > 0.522
    const double ls_lower = part.neighborhood_of_term(little_short)->interval.lower;
    CHECK_FALSE(match_ge_level(part, AttrValue{ls_lower}, AttrValue{little_short}));

    // term against term: ordinal order
    CHECK_FALSE(match_ge_level(part, AttrValue{very_short}, AttrValue{little_long}));
    CHECK(match_ge_level(part, AttrValue{little_long}, AttrValue{very_short}));
    CHECK(match_ge_level(part, AttrValue{little_long}, AttrValue{little_long}));

    // term against crisp: ordinals when the crisp side locates
    CHECK(match_ge_level(part, AttrValue{little_long}, AttrValue{0.53}));
    CHECK_FALSE(match_ge_level(part, AttrValue{very_short}, AttrValue{0.53}));
    // crisp side in a gap: fall back to the neighborhood's upper end
    CHECK(match_ge_level(part, AttrValue{little_long}, AttrValue{0.50}));
    CHECK_FALSE(match_ge_level(part, AttrValue{very_short}, AttrValue{0.50}));

    // a gap neighborhood on a linguistic operand is an error
    const Term lv_short = make_term(*alg, "little very short");
    try {
        match_ge_level(part, AttrValue{lv_short}, AttrValue{0.5});
        FAIL("expected UnmatchableValue");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnmatchableValue);
    }
    CHECK_THROWS_AS(match_ge_level(part, AttrValue{0.5}, AttrValue{lv_short}), Error);
    CHECK(try_match_ge_level(part, AttrValue{lv_short}, AttrValue{0.5}) ==
          MatchOutcome::Unmatchable);
}

TEST_CASE("level-1 location is total") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int c = 0; c < 50; ++c) {
        auto alg = std::make_shared<const ValidatedAlgebra>(
            validate_config(random_config(rng)));
        auto part = build_partition(alg, 1);
        CHECK(part.gaps().empty());
        for (int i = 0; i < 50; ++i)
            CHECK(part.locate_crisp(dist(rng)) != nullptr);
    }
}

TEST_CASE("random configurations: structure, gaps and the leaf-scan oracle") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(0.0, 1.0);

    for (int c = 0; c < 60; ++c) {
        auto alg = std::make_shared<const ValidatedAlgebra>(
            validate_config(random_config(rng)));
        for (int k = 1; k <= 4; ++k) {
            auto part = build_partition(alg, k);

            // every gap is some length-k term's first or last child
            for (const FuzzyInterval& gap : part.gaps()) {
                bool found = false;
                for (const Term& t : hedgeql::testing::all_terms_of_length(*alg, k)) {
                    auto layout = alg->child_layout(t.generator);
                    for (std::size_t slot : {std::size_t{0}, layout.size() - 1}) {
                        Term child = t;
                        child.hedges.insert(child.hedges.begin(), layout[slot].hedge);
                        if (fuzzy_interval(*alg, child) == gap) found = true;
                    }
                }
                CHECK(found);
            }

            LeafScanOracle oracle(*alg, k);
            for (int i = 0; i < 25; ++i) {
                double u = dist(rng);
                if (oracle.near_boundary(u, 1e-9)) continue;
                const SimilarityClass* located = part.locate_crisp(u);
                const std::string expected = oracle.locate(u);
                if (located == nullptr) CHECK(expected == "gap");
                else CHECK(part.label_text(*located) == expected);
            }
        }
    }
}

TEST_CASE("partition boundaries scale with one multiply-add") {
    auto alg = rectangle_algebra();
    const DomainScale scale{-40.0, 260.0};
    auto part = build_partition(alg, 3);
    for (const SimilarityClass& cls : part.classes()) {
        CHECK(scale_to_domain(scale, cls.interval.lower) ==
              scale.min + (scale.max - scale.min) * cls.interval.lower);
        CHECK(scale_to_domain(scale, cls.interval.upper) ==
              scale.min + (scale.max - scale.min) * cls.interval.upper);
    }
}
