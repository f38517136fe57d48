#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "hedgeql/partition.hpp"
#include "hedgeql/query.hpp"
#include "hedgeql/schema.hpp"

using namespace hedgeql;

namespace {

std::shared_ptr<const ValidatedAlgebra> bench_algebra() {
    HedgeAlgebraConfig cfg;
    cfg.negative_generator = "short";
    cfg.positive_generator = "long";
    cfg.fm_negative = 0.6;
    cfg.fm_positive = 0.4;
    cfg.positive_hedges = {{"More", 0.25}, {"Very", 0.35}};
    cfg.negative_hedges = {{"Possibly", 0.2}, {"Little", 0.2}};
    return std::make_shared<const ValidatedAlgebra>(validate_config(cfg));
}

std::shared_ptr<const FuzzyClassSchema> bench_schema() {
    std::vector<AttributeSpec> attrs;
    for (const char* name : {"length", "width"})
        attrs.push_back(AttributeSpec{name, DomainScale{0.0, 100.0}, bench_algebra()});
    return std::make_shared<const FuzzyClassSchema>(FuzzyClassSchema("Rectangular", attrs, {}));
}

Dataset bench_dataset(std::shared_ptr<const FuzzyClassSchema> schema, int count) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> value(0.0, 100.0);
    const auto& alg = *schema->attributes()[0].algebra;
    std::vector<Term> terms;
    for (const char* text : {"very short", "little long", "more long", "possibly short"})
        terms.push_back(std::get<Term>(parse_term(text, alg)));

    std::vector<FuzzyObject> objects;
    objects.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        FuzzyObject obj;
        obj.id = "o" + std::to_string(i);
        for (int a = 0; a < 2; ++a) {
            if (i % 3 == 0)
                obj.values.emplace_back(terms[rng() % terms.size()]);
            else
                obj.values.emplace_back(value(rng));
        }
        objects.push_back(std::move(obj));
    }
    return Dataset(std::move(schema), std::move(objects));
}

void BM_BuildPartition(benchmark::State& state) {
    auto alg = bench_algebra();
    const int level = static_cast<int>(state.range(0));
    for (auto _ : state) {
        LevelPartition part = build_partition(alg, level);
        benchmark::DoNotOptimize(part.classes().data());
    }
}
BENCHMARK(BM_BuildPartition)->DenseRange(1, 4);

void BM_LocateCrisp(benchmark::State& state) {
    auto part = build_partition(bench_algebra(), static_cast<int>(state.range(0)));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(part.locate_crisp(unit(rng)));
    }
}
BENCHMARK(BM_LocateCrisp)->DenseRange(1, 4);

void BM_ParseQuery(benchmark::State& state) {
    const std::string text =
        R"(select * from Rectangular where length = "little long" or width = "little short")";
    for (auto _ : state) {
        QueryAst ast = parse_query(text);
        benchmark::DoNotOptimize(ast.class_name.data());
    }
}
BENCHMARK(BM_ParseQuery);

void BM_ExecQuery(benchmark::State& state) {
    auto schema = bench_schema();
    const Dataset data = bench_dataset(schema, static_cast<int>(state.range(0)));
    const BoundQuery bound = hedgeql::bind(
        parse_query(
            R"(select * from Rectangular where length = "little long" or width = "little short")"),
        schema);
    for (auto _ : state) {
        ResultSet result = execute(bound, data);
        benchmark::DoNotOptimize(result.ids.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExecQuery)->Arg(1000)->Arg(10000)->Arg(100000);

} // namespace

BENCHMARK_MAIN();
