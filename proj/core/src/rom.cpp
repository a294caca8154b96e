#include "adapod/rom.hpp"

#include <cmath>
#include <fstream>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace adapod {

GalerkinProjector::GalerkinProjector(const PodBasis& basis, double sparse_density) : basis_(basis) {
    const auto& U = basis.U;
    if (U.cols() == 0) throw BasisInadequate("basis has no columns");
    const Eigen::Index nnz = (U.array() != 0.0).count();
    sparse_ = static_cast<double>(nnz) <= sparse_density * static_cast<double>(U.size());
    if (sparse_)
        U_sparse_ = U.sparseView(0.0, 0.0);
    else
        Ut_ = U.transpose();
}

ReducedSystem GalerkinProjector::reduce(const PressureSystem& system) const {
    const auto& U = basis_.U;
    if (system.A.rows() != U.rows() || system.A.cols() != U.rows() || system.b.size() != U.rows())
        throw DimensionMismatch("basis has " + std::to_string(U.rows()) + " rows, pressure system has " +
                                std::to_string(system.A.rows()));
    ReducedSystem out;
    out.sparse = sparse_;
    if (sparse_) {
        const Eigen::SparseMatrix<double> AU = system.A * U_sparse_;
        out.A_sparse = Eigen::SparseMatrix<double>(U_sparse_.transpose()) * AU;
        out.b = U_sparse_.transpose() * system.b;
    } else {
        // W = Ut A column by column; A is symmetric so only the lower half of W Ut^T is formed
        const auto& A = system.A;
        const Eigen::Index r = Ut_.rows();
        Eigen::MatrixXd W(r, A.cols());
        for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
            auto w = W.col(j);
            w.setZero();
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) w.noalias() += it.value() * Ut_.col(it.row());
        }
        Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(r, r);
        lower.triangularView<Eigen::Lower>() = W * Ut_.transpose();
        out.A = lower.selfadjointView<Eigen::Lower>();
        out.b.noalias() = Ut_ * system.b;
    }
    return out;
}

Eigen::VectorXd GalerkinProjector::reconstruct(const Eigen::VectorXd& reduced) const {
    if (reduced.size() != basis_.U.cols()) throw DimensionMismatch("reduced vector length does not match basis rank");
    if (sparse_) return U_sparse_ * reduced;
    return basis_.U * reduced;
}

Eigen::VectorXd GalerkinProjector::project(const Eigen::VectorXd& full) const {
    if (full.size() != basis_.U.rows()) throw DimensionMismatch("state length does not match basis");
    if (sparse_) return U_sparse_.transpose() * full;
    return basis_.U.transpose() * full;
}

ReducedSystem reduce_pressure_system(const PressureSystem& system, const PodBasis& basis) {
    return GalerkinProjector(basis).reduce(system);
}

namespace {

template <class Factor, class Matrix>
Eigen::VectorXd refine(const Factor& factor, const Matrix& A, const Eigen::VectorXd& b, double tolerance) {
    Eigen::VectorXd x = factor.solve(b);
    const double scale = b.norm() > 0.0 ? b.norm() : 1.0;
    Eigen::VectorXd r = b - A * x;
    double rel = r.norm() / scale;
    for (int it = 0; it < 4 && rel > tolerance; ++it) {
        x += factor.solve(r);
        r = b - A * x;
        rel = r.norm() / scale;
    }
    if (!x.allFinite()) throw BasisInadequate("reduced pressure solve produced non-finite values");
    if (!(rel <= tolerance)) throw SolverFailure("reduced solve residual " + std::to_string(rel) + " above tolerance", rel);
    return x;
}

void check_pivots(const Eigen::VectorXd& d) {
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (!(dmin > 1e-14 * dmax))
        throw BasisInadequate("reduced pressure matrix is singular (pivot ratio " +
                              format_double(dmax > 0.0 ? dmin / dmax : 0.0) + "); the basis cannot represent this system");
}

}  // namespace

Eigen::VectorXd ReducedSolver::solve(const ReducedSystem& system) {
    if (system.size() == 0) throw BasisInadequate("empty reduced system");
    if (system.sparse) {
        const auto& A = system.A_sparse;
        if (A.rows() != system.size() || A.cols() != system.size()) throw DimensionMismatch("reduced system shape");
        if (!analyzed_) {
            sparse_ldlt_.analyzePattern(A);
            analyzed_ = true;
        }
        sparse_ldlt_.factorize(A);
        if (sparse_ldlt_.info() != Eigen::Success) {
            sparse_ldlt_.analyzePattern(A);
            sparse_ldlt_.factorize(A);
        }
        if (sparse_ldlt_.info() != Eigen::Success) throw BasisInadequate("reduced pressure matrix factorization failed");
        check_pivots(sparse_ldlt_.vectorD());
        return refine(sparse_ldlt_, A, system.b, tolerance);
    }
    const auto& A = system.A;
    if (A.rows() != system.size() || A.cols() != system.size()) throw DimensionMismatch("reduced system shape");
    if (!A.allFinite()) throw BasisInadequate("reduced pressure matrix has non-finite entries");
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw BasisInadequate("reduced pressure matrix factorization failed");
    check_pivots(ldlt.vectorD());
    return refine(ldlt, A, system.b, tolerance);
}

Eigen::VectorXd solve_reduced(const ReducedSystem& system) {
    ReducedSolver solver;
    return solver.solve(system);
}

Eigen::VectorXd GalerkinPressureStage::solve(const PressureSystem& system) {
    const ReducedSystem reduced = projector_.reduce(system);
    last_reduced_ = solver_.solve(reduced);
    Eigen::VectorXd p = projector_.reconstruct(last_reduced_);
    if (!p.allFinite()) throw BasisInadequate("reconstructed pressure is not finite");
    return p;
}

RomState to_rom_state(const SimState& state, const PodBasis& basis) {
    return {project(basis, state.pressure), state.water_saturation, state.time};
}

SimState to_full_state(const RomState& state, const PodBasis& basis) {
    return {reconstruct(basis, state.reduced_pressure), state.water_saturation, state.time};
}

RomStepResult step_impes_rom(const ReservoirModel& model, const WellConfiguration& wells, const PodBasis& basis,
                             const RomState& state, const RomStepOptions& options) {
    if (basis.cells() != model.grid.cells())
        throw BasisInadequate("basis has " + std::to_string(basis.cells()) + " rows but the grid has " +
                              std::to_string(model.grid.cells()) + " cells");
    const auto faces = face_transmissibilities(model);
    const double slope = max_fractional_flow_slope(model.fluid);
    const SimState full = to_full_state(state, basis);

    GalerkinPressureStage stage(basis);
    const PressureSystem sys = assemble_pressure_system(model, faces, wells, full);
    const Eigen::VectorXd p = stage.solve(sys);

    RomStepResult out;
    out.fluxes = phase_fluxes(model, faces, wells, sys, full, p);
    out.dt = std::min(stable_dt(model, faces, wells, out.fluxes, options.time_step, slope), options.max_dt);
    const SimState next = saturation_step(model, faces, wells, full, out.fluxes, out.dt, slope);
    out.state = {stage.last_reduced(), next.water_saturation, state.time + out.dt};
    return out;
}

RomSimulationResult run_rom_simulation(const ReservoirModel& model, const WellConfiguration& wells,
                                       const PodBasis& basis, const Schedule& schedule,
                                       const SimulationOptions& options) {
    if (basis.cells() != model.grid.cells())
        throw BasisInadequate("basis has " + std::to_string(basis.cells()) + " rows but the grid has " +
                              std::to_string(model.grid.cells()) + " cells");
    GalerkinPressureStage stage(basis);
    RomSimulationResult out;
    out.run = run_impes(model, wells, schedule, stage, nullptr, options);
    out.rank = basis.rank();
    out.reduced_trajectory.reserve(out.run.trajectory.size());
    for (const auto& s : out.run.trajectory) out.reduced_trajectory.push_back(stage.projector().project(s.pressure));
    return out;
}

void write_rom_metadata(const std::filesystem::path& path, const PodBasis& basis, const RomSimulationResult& result) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "model = rom\n";
    out << "rank = " << basis.rank() << '\n';
    out << "basis_hash = " << basis.hash() << '\n';
    out << "lineage = " << basis.lineage.to_string() << '\n';
    out << "steps = " << result.run.steps << '\n';
    out << "pressure_solve_s = " << format_double(result.run.timers.pressure_solve_s) << '\n';
    out << "total_s = " << format_double(result.run.timers.total_s) << '\n';
}

}  // namespace adapod
