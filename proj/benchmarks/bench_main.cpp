#include <benchmark/benchmark.h>

#include "blowup/nonlinearity.hpp"
#include "blowup/op.hpp"
#include "blowup/solver.hpp"

using namespace blowup;

namespace {

const BernsteinSpec& spec() {
    static BernsteinSpec s = BernsteinSpec::stable(1.0);
    return s;
}

std::shared_ptr<const RadialGrid> grid(int n) {
    static BallDomain dom{2, 1.0};
    return RadialGrid::build(dom, n, 2.0);
}

void BM_RadialKernel(benchmark::State& st) {
    JumpKernel kern(spec(), 2, 1e-6, 10.0);
    double r = 0.5, s = 0.5001;
    for (auto _ : st) benchmark::DoNotOptimize(kern.K(r, s));
}
BENCHMARK(BM_RadialKernel);

void BM_Assemble(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BallDomain dom{2, 1.0};
    auto g = grid(n);
    AssembleOptions ao;
    ao.threads = 1;
    for (auto _ : st) {
        auto op = DiscreteOperator::assemble(spec(), dom, g, ao);
        benchmark::DoNotOptimize(op.entry(0, 0));
    }
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GreenSolve(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BallDomain dom{2, 1.0};
    auto g = grid(n);
    auto op = DiscreteOperator::assemble(spec(), dom, g, {});
    Field one = Field::constant(g, 1.0);
    op.green_apply(one);  // warm the factorization
    for (auto _ : st) {
        auto h = op.green_apply(one);
        benchmark::DoNotOptimize(h[0]);
    }
}
BENCHMARK(BM_GreenSolve)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_ModerateSolve(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BallDomain dom{2, 1.0};
    auto g = grid(n);
    auto op = DiscreteOperator::assemble(spec(), dom, g, {});
    auto nl = Nonlinearity::power(2.5);
    auto sur = renewal_surrogate(spec());
    auto martin = discrete_martin_profile(op, sur);
    for (auto _ : st) {
        auto mr = solve_moderate(op, nl, 9.0, martin);
        benchmark::DoNotOptimize(mr.u[0]);
    }
}
BENCHMARK(BM_ModerateSolve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PsiEval(benchmark::State& st) {
    auto nl = Nonlinearity::power(2.5);
    double t = 1e-3;
    for (auto _ : st) {
        benchmark::DoNotOptimize(nl.psi(t));
        t *= 1.0000001;
    }
}
BENCHMARK(BM_PsiEval);

}  // namespace

BENCHMARK_MAIN();
