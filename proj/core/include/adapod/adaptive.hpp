#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "adapod/pod.hpp"
#include "adapod/training.hpp"

namespace adapod {

/// Columns are s - U_o (U_o^T s) for the snapshots s of a new configuration.
struct ResidualSnapshotMatrix {
    Eigen::MatrixXd data;
    std::string base_basis_hash;
    /// Frobenius norm of the snapshots the residuals came from.
    double source_norm = 0.0;
};

/// Orthogonal-projection residual, with the projection applied twice so the
/// columns are orthogonal to span(U_o) to round-off.
ResidualSnapshotMatrix residual_snapshots(const SnapshotMatrix& snapshots, const PodBasis& base);

/// Components below this fraction of the leading residual singular value are
/// refused as noise, as are components at round-off level relative to the
/// source snapshots (kRankTolerance * source_norm).
inline constexpr double kResidualNoiseFloor = 1e-8;

/// Leading r_res left singular vectors of the residuals. When `base` is given
/// the components are scrubbed against it once more. Throws RankDeficiency
/// (with the achievable count) when the residual rank or the noise guard does
/// not allow r_res components.
PodBasis residual_basis(const ResidualSnapshotMatrix& residuals, int r_res, const PodBasis* base = nullptr);

/// [U_o | U_res] re-orthonormalized by two modified Gram-Schmidt passes. The
/// singular values are the base values followed by the residual ones. Throws
/// AugmentationError naming the first column that loses rank.
PodBasis augment_basis(const PodBasis& base, const PodBasis& residual, int new_snapshots = 0, std::uint64_t seed = 0);

struct AdaptationReport {
    PodBasis basis;
    ResidualSnapshotMatrix residuals;
    SnapshotMatrix snapshots;
    /// Squared Frobenius norm of the residuals over that of the snapshots.
    double residual_energy_fraction = 0.0;
};

/// Snapshots of the new configuration under randomized injector controls,
/// residuals against the base, residual SVD, augmentation.
AdaptationReport adapt_workflow(const PodBasis& base, const ReservoirModel& model, const WellConfiguration& new_wells,
                                const ControlPlan& controls, int n_snapshots, int r_res, std::uint64_t seed,
                                const SimulationOptions& options = {});

/// Augmentation step of the workflow from already collected snapshots.
AdaptationReport adapt_from_snapshots(const PodBasis& base, SnapshotMatrix snapshots, int r_res, std::uint64_t seed);

}  // namespace adapod
