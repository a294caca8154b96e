#include <random>

#include <benchmark/benchmark.h>

#include "adapod/config.hpp"
#include "adapod/pod.hpp"
#include "adapod/rom.hpp"

using namespace adapod;

namespace {

struct Fixture {
    ReservoirModel model;
    WellConfiguration wells;
    std::vector<Face> faces;
    SimState state;
    PressureSystem system;

    Fixture() : model(build_model(ScenarioConfig{})) {
        wells = build_wells(model, ScenarioConfig{});
        faces = face_transmissibilities(model);
        state = initial_state(model, 200e5);
        system = assemble_pressure_system(model, faces, wells, state);
        state.pressure = solve_pressure(system);
        system = assemble_pressure_system(model, faces, wells, state);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

PodBasis random_basis(Eigen::Index n, Eigen::Index r) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(n, r);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = g(rng);
    PodBasis b;
    b.U = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ() * Eigen::MatrixXd::Identity(n, r);
    b.singular_values = Eigen::VectorXd::Ones(r);
    return b;
}

void BM_Assemble(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(assemble_pressure_system(f.model, f.faces, f.wells, f.state));
}
BENCHMARK(BM_Assemble);

void BM_FullPressureSolve(benchmark::State& st) {
    const auto& f = fixture();
    PressureSolver solver;
    for (auto _ : st) benchmark::DoNotOptimize(solver.solve(f.system));
}
BENCHMARK(BM_FullPressureSolve);

void BM_Reduce(benchmark::State& st) {
    const auto& f = fixture();
    const GalerkinProjector proj(random_basis(f.model.grid.cells(), st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(proj.reduce(f.system));
}
BENCHMARK(BM_Reduce)->Arg(20)->Arg(23)->Arg(100);

void BM_ReducedSolve(benchmark::State& st) {
    const auto& f = fixture();
    const GalerkinProjector proj(random_basis(f.model.grid.cells(), st.range(0)));
    const ReducedSystem red = proj.reduce(f.system);
    ReducedSolver solver;
    for (auto _ : st) benchmark::DoNotOptimize(solver.solve(red));
}
BENCHMARK(BM_ReducedSolve)->Arg(20)->Arg(23)->Arg(100);

void BM_GalerkinStage(benchmark::State& st) {
    const auto& f = fixture();
    GalerkinPressureStage stage(random_basis(f.model.grid.cells(), st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(stage.solve(f.system));
}
BENCHMARK(BM_GalerkinStage)->Arg(20)->Arg(23)->Arg(100);

void BM_PodBasis(benchmark::State& st) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(1600, st.range(0));
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = g(rng);
    for (auto _ : st) benchmark::DoNotOptimize(compute_pod_basis(X, 20));
}
BENCHMARK(BM_PodBasis)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
