#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "adapod/errors.hpp"
#include "adapod/rom.hpp"
#include "adapod/units.hpp"
#include "oracles.hpp"

using namespace adapod;

namespace {

PodBasis basis_of(const Eigen::MatrixXd& U) {
    PodBasis b;
    b.U = U;
    b.singular_values = Eigen::VectorXd::Ones(U.cols());
    return b;
}

PressureSystem dense_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    PressureSystem sys;
    sys.A = A.sparseView();
    sys.b = b;
    return sys;
}

double a_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& e) { return std::sqrt(e.dot(A * e)); }

ReservoirModel channel_model(int n) {
    const Grid g = build_grid(n, n, 25.0 * n, 25.0 * n);
    const auto f = generate_channel_fields(g, {}, 5);
    return make_model(g, f.porosity, f.permeability, {});
}

WellConfiguration corner_wells(const ReservoirModel& m, double inj = 300e5, double prod = 100e5) {
    std::vector<Injector> injectors;
    for (int c : corner_cells(m.grid)) injectors.push_back({c, inj});
    const Point mid{m.grid.lx / 2.0 + m.grid.dx / 2.0, m.grid.ly / 2.0 + m.grid.dy / 2.0};
    return make_well_configuration(m, injectors, {{mid, 63.0, 3.0 * m.grid.dx}, prod});
}

}  // namespace

TEST(Reduce, IdentityBasisKeepsTheSystem) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd A = oracle::random_spd(40, rng);
    const Eigen::VectorXd b = oracle::random_matrix(40, 1, rng);
    const auto id = identity_basis(40);
    const auto red = reduce_pressure_system(dense_system(A, b), id);
    EXPECT_TRUE(red.sparse);
    EXPECT_LT((red.dense() - A).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(red.b, b);
    EXPECT_LT((solve_reduced(red) - A.inverse() * b).norm(), 1e-12 * b.norm());
}

TEST(Reduce, FirstCoordinateVectorPicksTheCorner) {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd A = oracle::random_spd(6, rng);
    const Eigen::VectorXd b = oracle::random_matrix(6, 1, rng);
    const auto red = reduce_pressure_system(dense_system(A, b), basis_of(Eigen::MatrixXd::Identity(6, 1)));
    ASSERT_EQ(red.size(), 1);
    EXPECT_NEAR(red.dense()(0, 0), A(0, 0), 1e-14);
    EXPECT_NEAR(red.b[0], b[0], 1e-15);
    EXPECT_NEAR(solve_reduced(red)[0], b[0] / A(0, 0), 1e-13 * std::abs(b[0] / A(0, 0)));
}

TEST(Reduce, DenseBasisMatchesTripleProduct) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd A = oracle::random_spd(40, rng);
    const Eigen::VectorXd b = oracle::random_matrix(40, 1, rng);
    const Eigen::MatrixXd U = oracle::random_orthonormal(40, 7, rng);
    const auto red = reduce_pressure_system(dense_system(A, b), basis_of(U));
    EXPECT_FALSE(red.sparse);
    const Eigen::MatrixXd ref = U.transpose() * A * U;
    EXPECT_LT((red.A - ref).norm(), 1e-12 * ref.norm());
    EXPECT_LT((red.A - red.A.transpose()).norm(), 1e-12 * ref.norm());
    EXPECT_LT((red.b - U.transpose() * b).norm(), 1e-12 * b.norm());
}

TEST(Reduce, SolutionInTheSpanIsRecoveredExactly) {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd A = oracle::random_spd(30, rng);
    const Eigen::MatrixXd U = oracle::random_orthonormal(30, 5, rng);
    const Eigen::VectorXd c = oracle::random_matrix(5, 1, rng);
    const Eigen::VectorXd p = U * c;
    GalerkinPressureStage stage(basis_of(U));
    const Eigen::VectorXd got = stage.solve(dense_system(A, A * p));
    EXPECT_LT((got - p).norm(), 1e-12 * p.norm());
    EXPECT_LT((stage.last_reduced() - c).norm(), 1e-12 * c.norm());
}

TEST(Reduce, GalerkinErrorIsOptimalAndShrinksWithNestedBases) {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd A = oracle::random_spd(30, rng);
    const Eigen::VectorXd b = oracle::random_matrix(30, 1, rng);
    const Eigen::VectorXd exact = A.ldlt().solve(b);
    const Eigen::MatrixXd Q = oracle::random_orthonormal(30, 12, rng);
    double prev = 1e300;
    for (int r = 1; r <= 12; ++r) {
        const auto basis = basis_of(Q.leftCols(r));
        GalerkinPressureStage stage(basis);
        const Eigen::VectorXd p = stage.solve(dense_system(A, b));
        const double err = a_norm(A, exact - p);
        EXPECT_LE(err, prev * (1.0 + 1e-12));
        prev = err;
        // any other element of the span is no better in the energy norm
        const Eigen::VectorXd other = p + Q.leftCols(r) * oracle::random_matrix(r, 1, rng) * 1e-3;
        EXPECT_LE(err, a_norm(A, exact - other) * (1.0 + 1e-12));
    }
}

TEST(Reduce, SingularReducedMatrixIsBasisInadequate) {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd A = oracle::random_spd(10, rng);
    Eigen::MatrixXd U = oracle::random_orthonormal(10, 3, rng);
    U.col(2).setZero();
    EXPECT_THROW(solve_reduced(reduce_pressure_system(dense_system(A, oracle::random_matrix(10, 1, rng)), basis_of(U))),
                 BasisInadequate);
}

TEST(Reduce, ProjectorRoundTrip) {
    std::mt19937_64 rng(7);
    const auto basis = basis_of(oracle::random_orthonormal(20, 4, rng));
    const GalerkinProjector proj(basis);
    const Eigen::VectorXd c = oracle::random_matrix(4, 1, rng);
    EXPECT_LT((proj.project(proj.reconstruct(c)) - c).norm(), 1e-13);
    EXPECT_FALSE(proj.sparse());
    const auto id = identity_basis(20);
    EXPECT_TRUE(GalerkinProjector(id).sparse());
}

TEST(RomStep, IdentityBasisMatchesTheFullStep) {
    const auto m = channel_model(10);
    const auto wells = corner_wells(m);
    const auto faces = face_transmissibilities(m);
    SimState s = initial_state(m, 200e5);
    const auto id = identity_basis(m.grid.cells());

    RomState rs = to_rom_state(s, id);
    for (int step = 0; step < 5; ++step) {
        const auto sys = assemble_pressure_system(m, faces, wells, s);
        const Eigen::VectorXd p = solve_pressure(sys);
        const auto flux = phase_fluxes(m, faces, wells, sys, s, p);
        const double slope = max_fractional_flow_slope(m.fluid);
        const double dt = stable_dt(m, faces, wells, flux, {}, slope);
        s = saturation_step(m, faces, wells, s, flux, dt, slope);
        s.pressure = p;

        const auto r = step_impes_rom(m, wells, id, rs);
        EXPECT_NEAR(r.dt, dt, 1e-9 * dt);
        EXPECT_LT((r.state.water_saturation - s.water_saturation).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((to_full_state(r.state, id).pressure - p).cwiseAbs().maxCoeff(), 1e-6);
        rs = r.state;
    }
}

TEST(RomStep, EquilibriumStaysAtRest) {
    const auto m = channel_model(8);
    auto wells = corner_wells(m, 200e5 + 1.0, 200e5);
    for (auto& inj : wells.injectors) inj.bhp = 200e5;
    const auto basis = basis_of(Eigen::VectorXd::Constant(m.grid.cells(), 1.0).normalized());
    const auto r = step_impes_rom(m, wells, basis, to_rom_state(initial_state(m, 200e5), basis));
    EXPECT_NEAR(r.fluxes.wells.oil_production, 0.0, 1e-15);
    EXPECT_NEAR(r.fluxes.wells.water_production, 0.0, 1e-15);
    EXPECT_LT((to_full_state(r.state, basis).pressure.array() - 200e5).abs().maxCoeff(), 1e-3);
}

TEST(RomSimulation, IdentityBasisReproducesTheFullRun) {
    const auto m = channel_model(12);
    const auto wells = corner_wells(m);
    const auto sched = constant_schedule(units::from_days(400.0), {260e5, 300e5, 330e5, 280e5}, 5);
    const auto full = run_simulation(m, wells, sched);
    const auto rom = run_rom_simulation(m, wells, identity_basis(m.grid.cells()), sched);
    ASSERT_EQ(rom.run.rates.size(), full.rates.size());
    EXPECT_EQ(rom.rank, m.grid.cells());
    EXPECT_EQ(rom.reduced_trajectory.size(), rom.run.trajectory.size());
    for (std::size_t i = 0; i < full.rates.size(); ++i) {
        EXPECT_NEAR(rom.run.rates.oil_rate[i], full.rates.oil_rate[i], 1e-8 * std::abs(full.rates.oil_rate[i]) + 1e-16);
        EXPECT_NEAR(rom.run.rates.water_rate[i], full.rates.water_rate[i], 1e-8 * std::abs(full.rates.oil_rate[i]) + 1e-16);
    }
}

TEST(RomSimulation, GridMismatchIsBasisInadequate) {
    const auto m = channel_model(6);
    EXPECT_THROW(run_rom_simulation(m, corner_wells(m), identity_basis(35),
                                    constant_schedule(units::from_days(10.0), {300e5, 300e5, 300e5, 300e5}, 1)),
                 BasisInadequate);
}

TEST(RomSimulation, MetadataNamesRankAndBasis) {
    const auto m = channel_model(6);
    const auto id = identity_basis(m.grid.cells());
    const auto rom = run_rom_simulation(m, corner_wells(m), id,
                                        constant_schedule(units::from_days(20.0), {300e5, 300e5, 300e5, 300e5}, 1));
    const auto path = std::filesystem::temp_directory_path() / "adapod_rom_meta.txt";
    write_rom_metadata(path, id, rom);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("rank = 36"), std::string::npos) << ss.str();
    EXPECT_NE(ss.str().find(id.hash()), std::string::npos);
    std::filesystem::remove(path);
}
