#include <benchmark/benchmark.h>

#include "hfree/checker.hpp"
#include "hfree/constructions.hpp"
#include "hfree/expr.hpp"
#include "hfree/gallery.hpp"
#include "hfree/jets.hpp"
#include "hfree/sampling.hpp"

namespace {

using namespace hfree;

constexpr const char* kSource = "(1 - y^2)*exp(x)*sin(z) + x*y/(2 + cos(z))^2 - exp(x*y)*z^3";

void BM_Parse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(parse(kSource));
}
BENCHMARK(BM_Parse);

void BM_DiffSimplify(benchmark::State& state) {
    const Expr e = parse(kSource);
    for (auto _ : state) benchmark::DoNotOptimize(simplify(diff(diff(e, "x"), "z")));
}
BENCHMARK(BM_DiffSimplify);

void BM_CompiledEval(benchmark::State& state) {
    const std::vector<std::string> coords{"x", "y", "z"};
    const CompiledExpr c(parse(kSource), coords);
    const std::vector<double> p{0.3, -0.7, 1.1};
    for (auto _ : state) benchmark::DoNotOptimize(c(p));
}
BENCHMARK(BM_CompiledEval);

void BM_JetD2(benchmark::State& state) {
    const Fixture fx = fixture(state.range(0) == 1 ? "contact-1" : "contact-2");
    const JetEvaluator d2(*fx.frame, *fx.free_map, 2);
    const auto pts = sample_points(fx.chart, RandomPlan{256, 1});
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(rank_check(d2(pts[i++ % pts.size()])));
}
BENCHMARK(BM_JetD2)->Arg(1)->Arg(2);

void BM_SymSquare(benchmark::State& state) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(state.range(0), state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sym_square(a));
}
BENCHMARK(BM_SymSquare)->DenseRange(1, 4);

void BM_GalleryRun(benchmark::State& state) {
    const Fixture fx = fixture("contact-2");
    for (auto _ : state) benchmark::DoNotOptimize(run_gallery(fx, RandomPlan{static_cast<std::size_t>(state.range(0)), 0}));
}
BENCHMARK(BM_GalleryRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
