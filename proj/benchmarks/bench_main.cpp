#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "blockoff/frontend.hpp"
#include "blockoff/search.hpp"
#include "blockoff/similarity.hpp"

namespace {

std::string synthetic_source(int functions)
{
    std::string s = "#include <stdio.h>\n";
    for (int f = 0; f < functions; ++f) {
        const auto n = std::to_string(f);
        s += "double work" + n + "(double *v, int n) {\n"
             "    double acc = 0.0;\n"
             "    for (int i = 0; i < n; i++) {\n"
             "        if (v[i] > " + n + ".0) acc += v[i] * v[i]; else acc -= v[i] / 2.0;\n"
             "    }\n"
             "    while (acc > 1e6) acc = acc / 10.0;\n"
             "    return acc;\n"
             "}\n";
    }
    s += "int main(void) { double v[4] = {1, 2, 3, 4}; printf(\"%f\\n\", work0(v, 4)); return 0; }\n";
    return s;
}

void BM_Parse(benchmark::State& state)
{
    const auto src = synthetic_source(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(blockoff::parse("bench.c", src));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Parse)->Arg(10)->Arg(100)->Arg(1000);

void BM_Vectorize(benchmark::State& state)
{
    const auto unit = blockoff::parse("bench.c", synthetic_source(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(blockoff::vectorize(unit.root));
}
BENCHMARK(BM_Vectorize)->Arg(10)->Arg(1000);

void BM_Similarity(benchmark::State& state)
{
    const auto a = blockoff::vectorize(blockoff::parse("a.c", synthetic_source(3)).root);
    const auto b = blockoff::vectorize(blockoff::parse("b.c", synthetic_source(4)).root);
    for (auto _ : state) benchmark::DoNotOptimize(blockoff::similarity(a, b));
}
BENCHMARK(BM_Similarity);

void BM_Search(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> t(0.5, 1.5);
    std::vector<double> table(1u << n);
    for (auto& x : table) x = t(rng);
    blockoff::MeasurementResult base;
    base.median_s = 1.0;
    const auto measure = [&](const blockoff::OffloadPattern& p) {
        std::size_t key = 0;
        for (const auto i : p.on_indices()) key |= std::size_t{1} << i;
        blockoff::MeasurementResult r;
        r.median_s = table[key];
        return r;
    };
    const auto no_conflicts = [](std::size_t, std::size_t) { return false; };
    for (auto _ : state) benchmark::DoNotOptimize(blockoff::search(n, no_conflicts, base, measure));
}
BENCHMARK(BM_Search)->Arg(5)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
