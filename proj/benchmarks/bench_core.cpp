// Throughput reference for the hot paths: QME solvents, exit-persistence
// rootfinding, multiplier evaluation both ways, chain assembly, the
// guess-and-verify path solver and one estimation objective evaluation.
// All cases run the bench calibration (or mild variants of it) so numbers
// are comparable across revisions.

#include <benchmark/benchmark.h>

#include <elbchain/arna.hpp>
#include <elbchain/chain.hpp>
#include <elbchain/estimate.hpp>
#include <elbchain/multiplier.hpp>
#include <elbchain/nkhabits.hpp>
#include <elbchain/qme.hpp>

using namespace elb;

namespace {

ModelSpec desk_model() { return build_model(desk_calibration()); }

} // namespace

static void BM_SolveSolvents(benchmark::State& state) {
    ModelSpec m = desk_model();
    QmeProblem prob = build_qme(m.elb.a, m.elb.b, m.d, m.rho);
    for (auto _ : state) {
        SolventPair pair = solve_solvents(prob);
        benchmark::DoNotOptimize(pair.gap);
    }
}
BENCHMARK(BM_SolveSolvents);

static void BM_SolveQ(benchmark::State& state) {
    ModelSpec m = desk_model();
    for (auto _ : state) {
        double q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_SolveQ);

static void BM_LimitMultiplier(benchmark::State& state) {
    ModelSpec m = desk_model();
    for (auto _ : state) {
        StabilityReport rep = limit_multiplier(m);
        benchmark::DoNotOptimize(rep.rho_psx);
    }
}
BENCHMARK(BM_LimitMultiplier);

static void BM_Recurse(benchmark::State& state) {
    ModelSpec m = desk_model();
    double q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);
    InitialConditions init = initial_conditions(m, q, Flavor::peg);
    int length = static_cast<int>(state.range(0));
    for (auto _ : state) {
        MultiplierSequence seq = recurse(init, m, length);
        benchmark::DoNotOptimize(seq.values.back());
    }
    state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_Recurse)->Arg(40)->Arg(160);

static void BM_SolventPath(benchmark::State& state) {
    ModelSpec m = desk_model();
    double q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);
    InitialConditions init = initial_conditions(m, q, Flavor::peg);
    std::vector<int> ells = {static_cast<int>(state.range(0))};
    for (auto _ : state) {
        std::vector<Vec> path = solvent_path(init, m, ells);
        benchmark::DoNotOptimize(path.back());
    }
}
BENCHMARK(BM_SolventPath)->Arg(40)->Arg(400);

static void BM_AssembleStates(benchmark::State& state) {
    ModelSpec m = desk_model();
    for (auto _ : state) {
        ChainSolution sol = assemble_states(m, 6, -0.02, 0.0);
        benchmark::DoNotOptimize(sol.y_states);
    }
}
BENCHMARK(BM_AssembleStates);

static void BM_FindDuration(benchmark::State& state) {
    ModelSpec m = desk_model();
    for (auto _ : state) {
        int ell = find_duration(m, -0.02, 0.0);
        benchmark::DoNotOptimize(ell);
    }
}
BENCHMARK(BM_FindDuration);

static void BM_SimulateChain(benchmark::State& state) {
    ModelSpec m = desk_model();
    ChainSolution sol = assemble_states(m, 6, -0.02, 0.0);
    for (auto _ : state) {
        SimResult sim = simulate_chain(sol.spec, sol.x_states, 1000, 40, 7);
        benchmark::DoNotOptimize(sim.mean);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateChain);

static void BM_SolveOccbin(benchmark::State& state) {
    ModelSpec m = desk_model();
    for (auto _ : state) {
        ArnaPath path = solve_occbin(m, -0.02, 0.0, 200);
        benchmark::DoNotOptimize(path.ell_realized);
    }
}
BENCHMARK(BM_SolveOccbin);

static void BM_ThresholdPbar(benchmark::State& state) {
    HabitsParams params = desk_calibration();
    for (auto _ : state) {
        double pbar = threshold_pbar(params);
        benchmark::DoNotOptimize(pbar);
    }
}
BENCHMARK(BM_ThresholdPbar);

static void BM_Objective(benchmark::State& state) {
    HabitsParams truth = desk_calibration();
    ModelSpec m = build_model(truth);
    int ell = find_duration(m, -0.02, 0.0);
    auto paths = model_expectations(truth, ell, 10, -0.02, 0.0);
    ExpectationsData data;
    data.ell_data = ell;
    for (int n = 0; n <= 10; ++n)
        for (const char* v : {"c", "pi", "r"})
            data.rows.push_back({v, n, paths.at(v)[n], 1.0});

    EstimationConfig cfg;
    cfg.free_params = {{"h", 0.1, 0.8}, {"p_b", 0.55, 0.95}, {"p_s", 0.55, 0.95}};
    cfg.fixed = {{"w_b0", -0.02}, {"w_s0", 0.0}};
    Vec theta(3);
    theta << truth.h, truth.p_b, truth.p_s;

    for (auto _ : state) {
        ObjectiveValue v = objective(theta, data, cfg);
        benchmark::DoNotOptimize(v.total);
    }
}
BENCHMARK(BM_Objective);

BENCHMARK_MAIN();
