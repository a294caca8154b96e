#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "adapod/reservoir_model.hpp"
#include "adapod/schedule.hpp"
#include "adapod/wells.hpp"

namespace adapod {

/// Interior face between cells a < b with geometric transmissibility (m^3).
/// Boundary faces are no-flow and are not stored.
struct Face {
    int a = 0;
    int b = 0;
    double transmissibility = 0.0;
};

/// Harmonic-mean TPFA transmissibilities: x-faces first (row-major), then y-faces.
std::vector<Face> face_transmissibilities(const ReservoirModel& model);

struct RelPerm {
    double krw = 0.0;
    double kro = 0.0;
};

/// Corey quadratic curves on normalized saturation. Inputs outside
/// [s_wc, 1 - s_or] are clamped (with a logged warning).
RelPerm relative_permeability(double sw, const FluidProperties& fluid);

struct Mobility {
    double water = 0.0;
    double oil = 0.0;
    double total() const { return water + oil; }
    double water_fraction() const { return water / (water + oil); }
};

Mobility phase_mobility(double sw, const FluidProperties& fluid);
double fractional_flow(double sw, const FluidProperties& fluid);
/// max over the mobile range of d f_w / d s_w (dense sampling plus refinement).
double max_fractional_flow_slope(const FluidProperties& fluid);

struct SimState {
    Eigen::VectorXd pressure;
    Eigen::VectorXd water_saturation;
    double time = 0.0;
};

/// Uniform initial state: s_w = s_wc (or the given value), p = given pressure.
SimState initial_state(const ReservoirModel& model, double pressure, std::optional<double> water_saturation = {});

struct PressureSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    /// Total mobility used for each face (same order as the face list).
    std::vector<double> face_mobility;
    /// Mobility used in each producer perforation term.
    std::vector<double> producer_mobility;
    /// Mobility used in each injector term.
    std::vector<double> injector_mobility;
};

/// Assembles A p = b for incompressible two-phase flow.
///
/// Face total mobility is taken from the upwind cell of the reference pressure
/// stored in `state` (the previous step's solution); ties use the mean of the
/// two cell mobilities. Injectors couple with end-point water mobility 1/mu_w,
/// producer perforations with the cell's total mobility. A is symmetric.
PressureSystem assemble_pressure_system(const ReservoirModel& model, std::span<const Face> faces,
                                        const WellConfiguration& wells, const SimState& state);

/// Sparse LDL^T solver that keeps the symbolic analysis between calls
/// (the sparsity pattern is fixed for a given grid).
class PressureSolver {
public:
    /// Throws SingularSystem or SolverFailure (relative residual > tolerance).
    Eigen::VectorXd solve(const PressureSystem& system);
    double tolerance = 1e-10;

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool analyzed_ = false;
    Eigen::Index pattern_nnz_ = -1;
};

Eigen::VectorXd solve_pressure(const PressureSystem& system);

struct WellRates {
    std::vector<double> injector_water;   // m^3/s injected (negative = backflow)
    std::vector<double> injector_total;   // total well rate, negative = backflow
    std::vector<double> producer_total;   // m^3/s produced per perforation (negative = backflow)
    std::vector<double> producer_water;   // water part per perforation
    double water_production = 0.0;        // sum over perforations
    double oil_production = 0.0;
    double water_injection = 0.0;         // sum over injectors
};

/// Face fluxes are positive from face.a to face.b.
struct FluxField {
    std::vector<double> total;
    std::vector<double> water;
    std::vector<double> oil;
    WellRates wells;
};

/// Total face flux T * lambda_face * (p_a - p_b) with the pressure system's face
/// mobility; the water part uses f_w of the upwind cell (the higher-pressure
/// side of the current solution). Well rates follow the same well terms as the
/// pressure system.
FluxField phase_fluxes(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                       const PressureSystem& system, const SimState& state, const Eigen::VectorXd& pressure);

/// Per-cell sum of outgoing total flux (faces and wells), m^3/s.
std::vector<double> cell_outflow(const ReservoirModel& model, std::span<const Face> faces,
                                 const WellConfiguration& wells, const FluxField& fluxes);

struct TimeStepOptions {
    double cfl_factor = 0.5;
    double dt_max = 30.0 * 86400.0;
};

/// cfl_factor * min_i phi_i V / (outflow_i * max f_w'), capped at dt_max.
double stable_dt(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                 const FluxField& fluxes, const TimeStepOptions& options, double max_slope);

struct SaturationStepReport {
    double clamped_volume = 0.0;  // m^3 removed or added by clamping
    double water_volume_change = 0.0;
};

/// Explicit upwind saturation update. Throws StabilityError when dt exceeds the
/// CFL limit (cfl_factor = 1). The report accumulates clamping volume.
SimState saturation_step(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                         const SimState& state, const FluxField& fluxes, double dt, double max_slope,
                         SaturationStepReport* report = nullptr);

struct RateSeries {
    std::vector<double> times;
    std::vector<double> water_rate;  // m^3/s, positive for production
    std::vector<double> oil_rate;

    std::size_t size() const { return times.size(); }
};

/// Collects flattened pressure states every `stride` steps, optionally
/// stopping the run once `max_snapshots` are held.
class SnapshotRecorder {
public:
    explicit SnapshotRecorder(int stride, int max_snapshots = -1);
    void offer(long step, const Eigen::VectorXd& pressure);
    bool full() const { return max_snapshots_ >= 0 && static_cast<int>(snapshots_.size()) >= max_snapshots_; }
    int stride() const { return stride_; }
    const std::vector<Eigen::VectorXd>& snapshots() const { return snapshots_; }
    std::vector<Eigen::VectorXd> take() { return std::move(snapshots_); }

private:
    int stride_;
    int max_snapshots_;
    std::vector<Eigen::VectorXd> snapshots_;
};

struct RunTimers {
    double pressure_solve_s = 0.0;  // linear solve only (full) / reduce + solve + reconstruct (ROM)
    double assembly_s = 0.0;
    double transport_s = 0.0;
    double total_s = 0.0;
};

struct MassBalance {
    double injected_water = 0.0;
    double produced_water = 0.0;
    double initial_water_in_place = 0.0;
    double final_water_in_place = 0.0;
    double clamped_volume = 0.0;

    /// |injected - produced - change in place| / max(injected, change in place)
    double relative_error() const;
};

struct SimulationResult {
    /// Initial state, every recorded state (recording stride) and the final state.
    std::vector<SimState> trajectory;
    RateSeries rates;
    RunTimers timers;
    MassBalance balance;
    long steps = 0;
};

struct SimulationOptions {
    TimeStepOptions time_step;
    bool keep_trajectory = true;
};

/// Strategy for the implicit half of an IMPES step: turns the assembled
/// system into a full-length pressure vector.
class PressureStage {
public:
    virtual ~PressureStage() = default;
    virtual Eigen::VectorXd solve(const PressureSystem& system) = 0;
};

/// Direct sparse solve of the full system.
class FullPressureStage final : public PressureStage {
public:
    Eigen::VectorXd solve(const PressureSystem& system) override { return solver_.solve(system); }

private:
    PressureSolver solver_;
};

/// IMPES loop shared by the full and reduced models: assemble A from the
/// previous saturation (upwinding on the previous pressure), obtain pressure
/// from `stage`, compute fluxes, take an explicit CFL-limited saturation step.
/// Steps are clipped to control-interval boundaries. The recorder receives the
/// pressure of every step; a full recorder ends the run early.
SimulationResult run_impes(const ReservoirModel& model, const WellConfiguration& wells, const Schedule& schedule,
                           PressureStage& stage, SnapshotRecorder* recorder = nullptr,
                           const SimulationOptions& options = {});

SimulationResult run_simulation(const ReservoirModel& model, const WellConfiguration& wells, const Schedule& schedule,
                                SnapshotRecorder* recorder = nullptr, const SimulationOptions& options = {});

/// Water in place sum_i phi_i V s_i.
double water_in_place(const ReservoirModel& model, const Eigen::VectorXd& saturation);

}  // namespace adapod
