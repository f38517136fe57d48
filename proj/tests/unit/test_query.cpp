#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hedgeql/query.hpp"
#include "test_support.hpp"

using namespace hedgeql;
using hedgeql::testing::NaiveCondition;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(HEDGEQL_FIXTURE_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::shared_ptr<const FuzzyClassSchema> rectangle_schema() {
    static const std::string bytes = read_fixture("rectangles.schema.json");
    return std::make_shared<const FuzzyClassSchema>(load_schema(bytes));
}

Dataset rectangle_dataset(std::shared_ptr<const FuzzyClassSchema> schema) {
    return load_dataset(read_fixture("rectangles.data.json"), std::move(schema));
}

const char* kQuery1 =
    R"(select * from Rectangular where length = "little long" or width = "little short")";
const char* kQuery2 = R"(select * from Rectangular where area() = "less small")";

std::vector<std::string> run_query(const std::string& text, EvalStats* stats = nullptr) {
    auto schema = rectangle_schema();
    Dataset data = rectangle_dataset(schema);
    BoundQuery bound = hedgeql::bind(parse_query(text), schema);
    return execute(bound, data, stats).ids;
}

ErrorKind query_error(const std::string& text) {
    try {
        auto schema = rectangle_schema();
        hedgeql::bind(parse_query(text), schema);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected the query to be rejected");
    return ErrorKind::SyntaxError;
}

} // namespace

// ---- parser ------------------------------------------------------------------

TEST_CASE("parse_query builds the published query shapes") {
    const QueryAst q1 = parse_query(kQuery1);
    CHECK(q1.select_all);
    CHECK(q1.class_name == "Rectangular");
    const auto* disjunction = std::get_if<OrGroup>(&q1.where.node);
    REQUIRE(disjunction != nullptr);
    REQUIRE(disjunction->children.size() == 2);
    const auto& left = std::get<AttrPredicate>(disjunction->children[0].node);
    CHECK(left.attribute == "length");
    CHECK(left.op == CompareOp::EqualLevel);
    CHECK(std::get<std::string>(left.rhs) == "little long");

    const QueryAst q2 = parse_query(kQuery2);
    const auto* method = std::get_if<MethodPredicate>(&q2.where.node);
    REQUIRE(method != nullptr);
    CHECK(method->method == "area");
    CHECK(method->term_text == "less small");
}

TEST_CASE("and binds tighter than or; parentheses override") {
    const QueryAst q = parse_query(
        R"(select * from C where a = 1 or b = 2 and c = 3)");
    const auto* disjunction = std::get_if<OrGroup>(&q.where.node);
    REQUIRE(disjunction != nullptr);
    REQUIRE(disjunction->children.size() == 2);
    CHECK(std::holds_alternative<AttrPredicate>(disjunction->children[0].node));
    CHECK(std::holds_alternative<AndGroup>(disjunction->children[1].node));

    const QueryAst grouped = parse_query(
        R"(select * from C where (a = 1 or b = 2) and c = 3)");
    const auto* conjunction = std::get_if<AndGroup>(&grouped.where.node);
    REQUIRE(conjunction != nullptr);
    CHECK(std::holds_alternative<OrGroup>(conjunction->children[0].node));
}

TEST_CASE("keywords are case-insensitive and projections parse") {
    const QueryAst q = parse_query(
        R"(SELECT length, width FROM Rectangular WHERE length >= 55)");
    CHECK_FALSE(q.select_all);
    CHECK(q.projection == std::vector<std::string>{"length", "width"});
    const auto& pred = std::get<AttrPredicate>(q.where.node);
    CHECK(pred.op == CompareOp::GreaterEqualLevel);
    CHECK(std::get<double>(pred.rhs) == 55.0);
}

TEST_CASE("syntax errors carry positions") {
    auto check_syntax_error = [](const std::string& text) {
        try {
            parse_query(text);
            FAIL(("expected SyntaxError for: " + text));
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SyntaxError);
            CHECK(e.position().has_value());
        }
    };
    check_syntax_error("select from where");
    check_syntax_error("select * from C");                        // missing where
    check_syntax_error("select * from C where");                  // missing predicate
    check_syntax_error(R"(select * from C where a = "x" extra)"); // trailing input
    check_syntax_error(R"(select * from C where a ~ "x")");       // bad operator
    check_syntax_error(R"(select * from C where a = "x)");        // unterminated string
    check_syntax_error(R"(select * from C where m() >= "x")");    // >= on a method
    check_syntax_error(R"(select * from C where m() = 5)");       // number on a method
    check_syntax_error(R"(select * from C where (a = 1)");        // missing )
    check_syntax_error("");
}

// ---- binding -----------------------------------------------------------------

TEST_CASE("bind resolves levels and condition neighborhoods") {
    auto schema = rectangle_schema();
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery1), schema);

    CHECK(bound.attributes_only());
    CHECK_FALSE(bound.single_method());
    CHECK(bound.leaf_count() == 2);
    CHECK(bound.warnings().empty());

    const auto* disjunction = std::get_if<BoundOrGroup>(&bound.root().node);
    REQUIRE(disjunction != nullptr);
    const auto& length_leaf = std::get<BoundLeaf>(disjunction->children[0].node);
    CHECK(length_leaf.level == 2);
    REQUIRE(length_leaf.condition_class != nullptr);
    CHECK(std::abs(length_leaf.condition_class->interval.lower * 100.0 - 61.6) < 1e-9);
    CHECK(std::abs(length_leaf.condition_class->interval.upper * 100.0 - 65.2) < 1e-9);

    const auto& width_leaf = std::get<BoundLeaf>(disjunction->children[1].node);
    CHECK(width_leaf.level == 2);
    REQUIRE(width_leaf.condition_class != nullptr);
    CHECK(std::abs(width_leaf.condition_class->interval.lower * 100.0 - 52.2) < 1e-9);
    CHECK(std::abs(width_leaf.condition_class->interval.upper * 100.0 - 57.6) < 1e-9);
}

TEST_CASE("bind expands method predicates per dependency") {
    auto schema = rectangle_schema();
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery2), schema);

    CHECK(bound.single_method());
    CHECK_FALSE(bound.attributes_only());
    CHECK(bound.leaf_count() == 2);

    const auto* method = std::get_if<BoundMethodGroup>(&bound.root().node);
    REQUIRE(method != nullptr);
    CHECK(method->connective == Connective::And);
    REQUIRE(method->dependencies.size() == 2);
    for (const BoundLeaf& dep : method->dependencies) {
        CHECK(dep.level == 2);
        REQUIRE(dep.condition_class != nullptr);
        // "less small" resolves to Little short in both dependency algebras
        CHECK(std::abs(dep.condition_class->interval.lower * 100.0 - 52.2) < 1e-9);
        CHECK(std::abs(dep.condition_class->interval.upper * 100.0 - 57.6) < 1e-9);
    }
}

TEST_CASE("bind errors") {
    CHECK(query_error(R"(select * from Rectangular where height = 5)") ==
          ErrorKind::UnknownAttribute);
    CHECK(query_error(R"(select * from Rectangular where perimeter() = "x")") ==
          ErrorKind::UnknownMethod);
    CHECK(query_error(R"(select * from Rectangular where length = "extremely long")") ==
          ErrorKind::UnknownTerm);
    CHECK(query_error(R"(select * from Rectangular where length = 120)") ==
          ErrorKind::OutOfDomain);
    CHECK(query_error(R"(select * from Circle where length = 5)") ==
          ErrorKind::ValidationError);
    CHECK(query_error(R"(select height from Rectangular where length = 5)") ==
          ErrorKind::UnknownAttribute);
    CHECK(query_error(R"(select area from Rectangular where length = 5)") ==
          ErrorKind::UnknownAttribute); // methods have no stored value
    CHECK(query_error(R"(select * from Rectangular where length = "W")") ==
          ErrorKind::UnsupportedValueKind);
}

TEST_CASE("a condition term whose neighborhood is a gap is reported, not fatal") {
    auto schema = rectangle_schema();
    Dataset data = rectangle_dataset(schema);

    // a five-word term clamps to level 4, where its representative value
    // falls into a trimmed child interval
    const BoundQuery bound = hedgeql::bind(
        parse_query(
            R"(select * from Rectangular where length = "little very very very short")"),
        schema);
    const auto* leaf = std::get_if<BoundLeaf>(&bound.root().node);
    REQUIRE(leaf != nullptr);
    CHECK(leaf->level == 4);
    CHECK(leaf->unmatchable);
    REQUIRE(bound.warnings().size() == 1);
    CHECK(bound.warnings()[0].find("gap") != std::string::npos);
    CHECK(execute(bound, data).ids.empty());
}

TEST_CASE("the condition level follows the resolved term's length") {
    auto schema = rectangle_schema();
    // a length-3 condition term binds at level 3, where it owns a class
    const BoundQuery bound = hedgeql::bind(
        parse_query(R"(select * from Rectangular where length = "little very short")"),
        schema);
    const auto* leaf = std::get_if<BoundLeaf>(&bound.root().node);
    REQUIRE(leaf != nullptr);
    CHECK(leaf->level == 3);
    CHECK_FALSE(leaf->unmatchable);
    CHECK(bound.warnings().empty());
    REQUIRE(leaf->condition_class != nullptr);
    // S(Little Very short) at level 3 sits inside I(Little Very short)
    CHECK(leaf->condition_class->interval.lower > 0.168);
    CHECK(leaf->condition_class->interval.upper < 0.211);
}

// ---- execution ----------------------------------------------------------------

TEST_CASE("query 1: disjunction over both attributes") {
    CHECK(run_query(kQuery1) ==
          std::vector<std::string>{"iD1", "iD2", "iD5", "iD6"});
}

TEST_CASE("query 1 with a conjunction intersects the satisfier sets") {
    CHECK(run_query(
              R"(select * from Rectangular where length = "little long" and width = "little short")") ==
          std::vector<std::string>{"iD1"});
}

TEST_CASE("query 2: method condition with connective and") {
    CHECK(run_query(kQuery2) == std::vector<std::string>{"iD2", "iD6"});
}

TEST_CASE("method with connective or unions the dependency satisfiers") {
    // same method but with an or-combination
    std::string schema_bytes = read_fixture("rectangles.schema.json");
    const auto pos = schema_bytes.find("\"connective\": \"and\"");
    REQUIRE(pos != std::string::npos);
    schema_bytes.replace(pos, std::string("\"connective\": \"and\"").size(),
                         "\"connective\": \"or\"");
    auto schema = std::make_shared<const FuzzyClassSchema>(load_schema(schema_bytes));
    Dataset data = rectangle_dataset(schema);
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery2), schema);
    CHECK(exec_smsn(bound, data).ids ==
          std::vector<std::string>{"iD1", "iD2", "iD6"});
}

TEST_CASE("crisp >= conditions compare numerically and by ordinal") {
    // iD1 62>=55, iD4 58>=55, iD6 55>=55; iD5's Little long locates to
    // S(W) at level 1 whose ordinal equals locate(0.55)
    CHECK(run_query(R"(select * from Rectangular where length >= 55)") ==
          std::vector<std::string>{"iD1", "iD4", "iD5", "iD6"});
}

TEST_CASE("crisp = conditions match equal values or the shared level-1 class") {
    // the level-1 class around 0.55 is (48, 68]: lengths 62, 53, 58, 55
    // sit inside it, and Little long's representative 0.632 does too;
    // Very Very short locates to S(0)
    CHECK(run_query(R"(select * from Rectangular where length = 55)") ==
          std::vector<std::string>{"iD1", "iD2", "iD4", "iD5", "iD6"});
    CHECK(run_query(R"(select * from Rectangular where length = 10)") ==
          std::vector<std::string>{"iD3"});
}

TEST_CASE("empty dataset yields an empty result") {
    auto schema = rectangle_schema();
    Dataset empty = load_dataset(R"({ "class": "Rectangular", "objects": [] })", schema);
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery1), schema);
    CHECK(execute(bound, empty).ids.empty());
    CHECK(explain(bound, empty).objects.empty());
}

TEST_CASE("exec_sasn and exec_smsn enforce their condition shapes") {
    auto schema = rectangle_schema();
    Dataset data = rectangle_dataset(schema);
    const BoundQuery attrs = hedgeql::bind(parse_query(kQuery1), schema);
    const BoundQuery method = hedgeql::bind(parse_query(kQuery2), schema);

    CHECK_THROWS_AS(exec_smsn(attrs, data), Error);
    CHECK_THROWS_AS(exec_sasn(method, data), Error);
    CHECK(exec_sasn(attrs, data).ids == execute(attrs, data).ids);
    CHECK(exec_smsn(method, data).ids == execute(method, data).ids);
}

TEST_CASE("a single-dependency method behaves like the attribute condition") {
    std::string schema_bytes = read_fixture("rectangles.schema.json");
    const auto pos = schema_bytes.find(R"("deps": ["length", "width"])");
    REQUIRE(pos != std::string::npos);
    schema_bytes.replace(pos, std::string(R"("deps": ["length", "width"])").size(),
                         R"("deps": ["length"])");
    auto schema = std::make_shared<const FuzzyClassSchema>(load_schema(schema_bytes));
    Dataset data = rectangle_dataset(schema);

    const auto via_method =
        exec_smsn(hedgeql::bind(parse_query(R"(select * from Rectangular where area() = "little short")"),
                       schema),
                  data);
    const auto via_attr =
        exec_sasn(hedgeql::bind(parse_query(R"(select * from Rectangular where length = "little short")"),
                       schema),
                  data);
    CHECK(via_method.ids == via_attr.ids);
}

TEST_CASE("every object/leaf pair is evaluated exactly once") {
    EvalStats stats;
    run_query(kQuery1, &stats);
    CHECK(stats.objects_visited == 6);
    CHECK(stats.leaf_evaluations == 6 * 2);

    EvalStats method_stats;
    run_query(kQuery2, &method_stats);
    CHECK(method_stats.leaf_evaluations == 6 * 2); // two expanded dependencies
}

TEST_CASE("or never shrinks and and never grows the result") {
    const auto base =
        run_query(R"(select * from Rectangular where length = "little long")");
    const auto with_or = run_query(kQuery1);
    const auto with_and = run_query(
        R"(select * from Rectangular where length = "little long" and width = "little short")");
    for (const std::string& id : base)
        CHECK(std::find(with_or.begin(), with_or.end(), id) != with_or.end());
    for (const std::string& id : with_and)
        CHECK(std::find(base.begin(), base.end(), id) != base.end());
}

TEST_CASE("execution is deterministic") {
    auto schema = rectangle_schema();
    Dataset data = rectangle_dataset(schema);
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery1), schema);
    const auto first = execute(bound, data);
    const auto second = execute(bound, data);
    CHECK(first.ids == second.ids);
    CHECK(trace_to_json(explain(bound, data)) == trace_to_json(explain(bound, data)));
}

// ---- explain ------------------------------------------------------------------

TEST_CASE("explain records per-leaf class hits and misses") {
    auto schema = rectangle_schema();
    Dataset data = rectangle_dataset(schema);
    const BoundQuery bound = hedgeql::bind(parse_query(kQuery1), schema);
    const Trace trace = explain(bound, data);

    REQUIRE(trace.objects.size() == 6);
    REQUIRE(trace.partitions.size() == 2); // (length,2) and (width,2)

    const ObjectTrace& id4 = trace.objects[3];
    CHECK(id4.id == "iD4");
    CHECK_FALSE(id4.matched);
    REQUIRE(id4.leaves.size() == 2);
    CHECK(id4.leaves[0].value_text == "58");
    CHECK(id4.leaves[0].located_label == "S(W)");
    CHECK(id4.leaves[0].condition_label == "S(Little long)");
    CHECK_FALSE(id4.leaves[0].outcome);
    CHECK(id4.leaves[1].value_text == "Very long");
    CHECK(id4.leaves[1].located_label == "S(Very long)");
    CHECK(id4.leaves[1].condition_label == "S(Little short)");
    CHECK_FALSE(id4.leaves[1].outcome);

    const ObjectTrace& id5 = trace.objects[4];
    CHECK(id5.matched);
    CHECK(id5.leaves[0].located_label == "S(Little long)");
    CHECK(id5.leaves[0].outcome);

    // the trace serializes to plain JSON
    const std::string json_text = trace_to_json(trace, 2);
    CHECK(json_text.find("\"located\"") != std::string::npos);
    CHECK(json_text.find("S(Little long)") != std::string::npos);
}

TEST_CASE("explain labels gap hits") {
    auto schema = rectangle_schema();
    Dataset data = load_dataset(
        R"({ "class": "Rectangular",
             "objects": [ { "id": "g1", "values": { "length": 50, "width": 10 } } ] })",
        schema);
    const BoundQuery bound = hedgeql::bind(
        parse_query(R"(select * from Rectangular where length = "little short")"), schema);
    const Trace trace = explain(bound, data);
    REQUIRE(trace.objects.size() == 1);
    CHECK(trace.objects[0].leaves[0].located_label == "gap"); // 50 in (48, 52.2]
    CHECK_FALSE(trace.objects[0].matched);
}

// ---- randomized oracle equivalence ---------------------------------------------

TEST_CASE("exec_sasn agrees with the naive evaluator on random datasets") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int round = 0; round < 40; ++round) {
        // random schema: 1-3 attributes sharing random algebras
        const int attr_count = 1 + static_cast<int>(rng() % 3);
        std::vector<AttributeSpec> attrs;
        for (int a = 0; a < attr_count; ++a) {
            AttributeSpec spec;
            spec.name = "a" + std::to_string(a);
            spec.scale = DomainScale{0.0, 100.0};
            spec.algebra = std::make_shared<const ValidatedAlgebra>(
                validate_config(hedgeql::testing::random_config(rng)));
            attrs.push_back(std::move(spec));
        }
        auto schema = std::make_shared<const FuzzyClassSchema>(
            FuzzyClassSchema("C", attrs, {}));

        // random objects mixing crisp and linguistic values
        std::vector<FuzzyObject> objects;
        const int object_count = 1 + static_cast<int>(rng() % 50);
        for (int i = 0; i < object_count; ++i) {
            FuzzyObject obj;
            obj.id = "o" + std::to_string(i);
            for (int a = 0; a < attr_count; ++a) {
                if (rng() % 2 == 0) {
                    obj.values.emplace_back(unit(rng) * 100.0);
                } else {
                    const int len = 1 + static_cast<int>(rng() % 3);
                    auto terms = hedgeql::testing::all_terms_of_length(
                        *attrs[static_cast<std::size_t>(a)].algebra, len);
                    obj.values.emplace_back(terms[rng() % terms.size()]);
                }
            }
            objects.push_back(std::move(obj));
        }
        Dataset data(schema, std::move(objects));

        // random homogeneous-connective query over 1-3 leaves
        const Connective connective = rng() % 2 == 0 ? Connective::And : Connective::Or;
        const int leaf_count = 1 + static_cast<int>(rng() % 3);
        std::vector<NaiveCondition> conditions;
        std::string text = "select * from C where ";
        for (int l = 0; l < leaf_count; ++l) {
            NaiveCondition c;
            const int a = static_cast<int>(rng() % attr_count);
            c.attribute = "a" + std::to_string(a);
            c.op = rng() % 4 == 0 ? CompareOp::GreaterEqualLevel : CompareOp::EqualLevel;
            if (rng() % 3 == 0) {
                c.rhs = std::floor(unit(rng) * 100.0);
            } else {
                const int len = 1 + static_cast<int>(rng() % 3);
                auto terms = hedgeql::testing::all_terms_of_length(
                    *attrs[static_cast<std::size_t>(a)].algebra, len);
                c.rhs = term_text(*attrs[static_cast<std::size_t>(a)].algebra,
                                  terms[rng() % terms.size()]);
            }
            if (l > 0) text += connective == Connective::And ? " and " : " or ";
            text += c.attribute;
            text += c.op == CompareOp::EqualLevel ? " = " : " >= ";
            if (const auto* crisp = std::get_if<double>(&c.rhs))
                text += std::to_string(*crisp);
            else
                text += "\"" + std::get<std::string>(c.rhs) + "\"";
            conditions.push_back(std::move(c));
        }

        const auto expected = hedgeql::testing::naive_query(data, connective, conditions);
        const auto actual = exec_sasn(hedgeql::bind(parse_query(text), schema), data);
        CHECK(actual.ids == expected);
    }
}

TEST_CASE("exec_smsn agrees with per-dependency attribute runs") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int round = 0; round < 25; ++round) {
        const int attr_count = 1 + static_cast<int>(rng() % 3);
        std::vector<AttributeSpec> attrs;
        for (int a = 0; a < attr_count; ++a) {
            AttributeSpec spec;
            spec.name = "a" + std::to_string(a);
            spec.scale = DomainScale{0.0, 10.0};
            spec.algebra = std::make_shared<const ValidatedAlgebra>(
                validate_config(hedgeql::testing::random_config(rng)));
            attrs.push_back(std::move(spec));
        }
        const Connective connective = rng() % 2 == 0 ? Connective::And : Connective::Or;
        std::vector<std::string> deps;
        for (int a = 0; a < attr_count; ++a) deps.push_back("a" + std::to_string(a));
        auto schema = std::make_shared<const FuzzyClassSchema>(
            FuzzyClassSchema("C", attrs, {MethodSpec{"m", deps, connective}}));

        std::vector<FuzzyObject> objects;
        const int object_count = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < object_count; ++i) {
            FuzzyObject obj;
            obj.id = "o" + std::to_string(i);
            for (int a = 0; a < attr_count; ++a) {
                if (rng() % 2 == 0) {
                    obj.values.emplace_back(unit(rng) * 10.0);
                } else {
                    auto terms = hedgeql::testing::all_terms_of_length(
                        *attrs[static_cast<std::size_t>(a)].algebra,
                        1 + static_cast<int>(rng() % 3));
                    obj.values.emplace_back(terms[rng() % terms.size()]);
                }
            }
            objects.push_back(std::move(obj));
        }
        Dataset data(schema, std::move(objects));

        // the method term: "possibly low" etc., valid in every dependency
        const char* candidates[] = {"low", "high", "possibly low", "very high",
                                    "little low", "more more high"};
        const std::string term = candidates[rng() % 6];

        // hand combination of single-leaf attribute runs
        std::vector<std::vector<std::string>> per_dep;
        for (const std::string& dep : deps) {
            const auto ids = exec_sasn(
                hedgeql::bind(parse_query("select * from C where " + dep + " = \"" + term + "\""),
                     schema),
                data);
            per_dep.push_back(ids.ids);
        }
        std::vector<std::string> expected;
        for (const FuzzyObject& obj : data.objects()) {
            bool all = true, any = false;
            for (const auto& ids : per_dep) {
                const bool m = std::find(ids.begin(), ids.end(), obj.id) != ids.end();
                all = all && m;
                any = any || m;
            }
            if (connective == Connective::And ? all : any) expected.push_back(obj.id);
        }

        const auto actual = exec_smsn(
            hedgeql::bind(parse_query("select * from C where m() = \"" + term + "\""), schema), data);
        CHECK(actual.ids == expected);
    }
}
