#pragma once

#include <filesystem>
#include <limits>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "adapod/fullsim.hpp"
#include "adapod/pod.hpp"

namespace adapod {

/// Reduced state: pressure coefficients in the basis plus the full saturation field.
struct RomState {
    Eigen::VectorXd reduced_pressure;
    Eigen::VectorXd water_saturation;
    double time = 0.0;
};

/// A_r = U^T A U and b_r = U^T b. Structurally sparse bases (e.g. the
/// identity) keep A_r sparse; everything else is dense.
struct ReducedSystem {
    Eigen::MatrixXd A;
    Eigen::SparseMatrix<double> A_sparse;
    Eigen::VectorXd b;
    bool sparse = false;

    Eigen::Index size() const { return b.size(); }
    Eigen::MatrixXd dense() const { return sparse ? Eigen::MatrixXd(A_sparse) : A; }
};

/// Caches the representation of U (dense, or sparse when at most
/// `sparse_density` of its entries are nonzero) for repeated projection.
class GalerkinProjector {
public:
    explicit GalerkinProjector(const PodBasis& basis, double sparse_density = 0.05);

    ReducedSystem reduce(const PressureSystem& system) const;
    Eigen::VectorXd reconstruct(const Eigen::VectorXd& reduced) const;
    Eigen::VectorXd project(const Eigen::VectorXd& full) const;
    const PodBasis& basis() const { return basis_; }
    bool sparse() const { return sparse_; }

private:
    PodBasis basis_;
    bool sparse_ = false;
    Eigen::SparseMatrix<double> U_sparse_;
    Eigen::MatrixXd Ut_;
};

ReducedSystem reduce_pressure_system(const PressureSystem& system, const PodBasis& basis);

/// Direct solve of the reduced system with iterative refinement. A singular
/// reduced matrix throws BasisInadequate; SolverFailure when the relative
/// residual stays above `tolerance`.
class ReducedSolver {
public:
    Eigen::VectorXd solve(const ReducedSystem& system);
    double tolerance = 1e-12;

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_ldlt_;
    bool analyzed_ = false;
};

Eigen::VectorXd solve_reduced(const ReducedSystem& system);

/// Pressure stage that solves in the span of the basis and hands the
/// reconstructed pressure to the shared IMPES loop.
class GalerkinPressureStage final : public PressureStage {
public:
    explicit GalerkinPressureStage(const PodBasis& basis) : projector_(basis) {}
    Eigen::VectorXd solve(const PressureSystem& system) override;
    const Eigen::VectorXd& last_reduced() const { return last_reduced_; }
    const GalerkinProjector& projector() const { return projector_; }

private:
    GalerkinProjector projector_;
    ReducedSolver solver_;
    Eigen::VectorXd last_reduced_;
};

RomState to_rom_state(const SimState& state, const PodBasis& basis);
SimState to_full_state(const RomState& state, const PodBasis& basis);

struct RomStepOptions {
    TimeStepOptions time_step;
    /// Upper bound on dt, e.g. the time left in the control interval.
    double max_dt = std::numeric_limits<double>::infinity();
};

struct RomStepResult {
    RomState state;
    FluxField fluxes;
    double dt = 0.0;
};

/// One reduced IMPES step. Face upwinding uses the reconstructed pressure of
/// the incoming state.
RomStepResult step_impes_rom(const ReservoirModel& model, const WellConfiguration& wells, const PodBasis& basis,
                             const RomState& state, const RomStepOptions& options = {});

struct RomSimulationResult {
    SimulationResult run;
    /// Reduced coefficients matching run.trajectory entry by entry.
    std::vector<Eigen::VectorXd> reduced_trajectory;
    Eigen::Index rank = 0;
};

/// run_simulation with the reduced pressure path. Throws BasisInadequate when
/// the basis does not fit the grid or the reduced solve breaks down.
RomSimulationResult run_rom_simulation(const ReservoirModel& model, const WellConfiguration& wells,
                                       const PodBasis& basis, const Schedule& schedule,
                                       const SimulationOptions& options = {});

/// "key = value" lines: rank, basis_hash, lineage, steps, timers.
void write_rom_metadata(const std::filesystem::path& path, const PodBasis& basis, const RomSimulationResult& result);

}  // namespace adapod
