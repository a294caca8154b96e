#include "adapod/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "adapod/errors.hpp"

namespace adapod {

namespace {

void project_out(const Eigen::MatrixXd& U, Eigen::MatrixXd& X) {
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd coeff = U.transpose() * X;
        X.noalias() -= U * coeff;
    }
}

}  // namespace

ResidualSnapshotMatrix residual_snapshots(const SnapshotMatrix& snapshots, const PodBasis& base) {
    if (snapshots.data.rows() != base.cells())
        throw DimensionMismatch("snapshots have " + std::to_string(snapshots.data.rows()) + " rows, basis has " +
                                std::to_string(base.cells()));
    ResidualSnapshotMatrix out{snapshots.data, base.hash(), snapshots.data.norm()};
    project_out(base.U, out.data);
    return out;
}

PodBasis residual_basis(const ResidualSnapshotMatrix& residuals, int r_res, const PodBasis* base) {
    if (r_res < 1) throw InvalidArgument("residual component count must be >= 1");
    const ThinSvd svd = snapshot_svd(residuals.data);
    const Eigen::Index rank = svd.sigma.size();
    if (rank == 0) throw RankDeficiency("residual snapshots are zero: nothing to add", 0);
    Eigen::Index usable = 0;
    const double floor = std::max(kResidualNoiseFloor * svd.sigma[0], kRankTolerance * residuals.source_norm);
    while (usable < rank && svd.sigma[usable] >= floor) ++usable;
    if (r_res > usable)
        throw RankDeficiency("requested " + std::to_string(r_res) + " residual components but only " +
                                 std::to_string(usable) + " lie above the noise floor",
                             static_cast<int>(usable));

    PodBasis out;
    out.U = svd.U.leftCols(r_res);
    if (base) {
        project_out(base->U, out.U);
        out.U.colwise().normalize();
    }
    normalize_signs(out.U);
    out.singular_values = svd.sigma;
    out.lineage.kind = LineageKind::adaptive;
    out.lineage.base_hash = residuals.base_basis_hash;
    out.lineage.residual_components = r_res;
    return out;
}

PodBasis augment_basis(const PodBasis& base, const PodBasis& residual, int new_snapshots, std::uint64_t seed) {
    const Eigen::Index r = base.rank();
    const Eigen::Index k = residual.rank();
    if (k > 0 && residual.cells() != base.cells()) throw DimensionMismatch("residual basis has a different row count");
    if (r + k > base.cells())
        throw AugmentationError("augmented basis would have more columns than rows", static_cast<int>(base.cells()));

    PodBasis out;
    out.U.resize(base.cells(), r + k);
    out.U.leftCols(r) = base.U;
    if (k > 0) out.U.rightCols(k) = residual.U;
    for (Eigen::Index j = 0; j < r + k; ++j) {
        const double original = out.U.col(j).norm();
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) out.U.col(j) -= out.U.col(i).dot(out.U.col(j)) * out.U.col(i);
        const double scrubbed = out.U.col(j).norm();
        if (!(scrubbed > 1e-8 * original))
            throw AugmentationError("column " + std::to_string(j) + " is numerically dependent on the columns before it",
                                    static_cast<int>(j));
        out.U.col(j) /= scrubbed;
    }

    out.singular_values.resize(r + k);
    out.singular_values.head(r) = base.singular_values.head(r);
    if (k > 0) out.singular_values.tail(k) = residual.singular_values.head(k);
    out.lineage.kind = LineageKind::adaptive;
    out.lineage.base_hash = base.hash();
    out.lineage.residual_components = static_cast<int>(k);
    out.lineage.new_snapshots = new_snapshots;
    out.lineage.seed = seed;
    out.seed = seed;
    out.config_hash = base.config_hash;
    return out;
}

AdaptationReport adapt_from_snapshots(const PodBasis& base, SnapshotMatrix snapshots, int r_res, std::uint64_t seed) {
    if (r_res < 0) throw InvalidArgument("residual component count must be >= 0");
    if (snapshots.states() < r_res)
        throw RankDeficiency(std::to_string(snapshots.states()) + " snapshots cannot supply " + std::to_string(r_res) +
                                 " residual components",
                             static_cast<int>(snapshots.states()));
    AdaptationReport out;
    out.residuals = residual_snapshots(snapshots, base);
    const double total = snapshots.data.squaredNorm();
    out.residual_energy_fraction = total > 0.0 ? out.residuals.data.squaredNorm() / total : 0.0;
    const int m = static_cast<int>(snapshots.states());
    if (r_res == 0) {
        out.basis = augment_basis(base, PodBasis{}, m, seed);
    } else {
        const PodBasis res = residual_basis(out.residuals, r_res, &base);
        out.basis = augment_basis(base, res, m, seed);
    }
    out.snapshots = std::move(snapshots);
    return out;
}

AdaptationReport adapt_workflow(const PodBasis& base, const ReservoirModel& model, const WellConfiguration& new_wells,
                                const ControlPlan& controls, int n_snapshots, int r_res, std::uint64_t seed,
                                const SimulationOptions& options) {
    if (base.cells() != model.grid.cells()) throw DimensionMismatch("base basis does not match the grid");
    if (n_snapshots < r_res) throw InvalidArgument("need at least as many new snapshots as residual components");
    if (n_snapshots < 1) throw InvalidArgument("adaptation needs at least one snapshot");
    const TrainingPlan plan = make_training_plan(TrainingMode::local, controls, n_snapshots);
    CampaignResult campaign = collect_snapshots(model, new_wells, plan, seed, "adaptation", options);
    return adapt_from_snapshots(base, std::move(campaign.snapshots), r_res, seed);
}

}  // namespace adapod
