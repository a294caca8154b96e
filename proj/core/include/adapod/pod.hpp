#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adapod {

struct SnapshotProvenance {
    std::string scenario = "unnamed";
    std::uint64_t config_hash = 0;
    int stride = 1;
    std::uint64_t seed = 0;
};

/// n x m matrix whose columns are flattened pressure states.
struct SnapshotMatrix {
    Eigen::MatrixXd data;
    SnapshotProvenance provenance;

    Eigen::Index states() const { return data.cols(); }
    Eigen::Index cells() const { return data.rows(); }
};

/// Stacks the states as columns, unmodified (no mean-centering).
SnapshotMatrix build_snapshot_matrix(std::span<const Eigen::VectorXd> states, SnapshotProvenance provenance);

/// Horizontal concatenation of snapshot matrices with equal row counts.
SnapshotMatrix concatenate(std::span<const SnapshotMatrix> parts);

enum class LineageKind { universal, local, adaptive };

struct Lineage {
    LineageKind kind = LineageKind::local;
    std::string config;     // local: configuration hash; universal: free-form tag
    std::string base_hash;  // adaptive only
    int residual_components = 0;
    int new_snapshots = 0;
    std::uint64_t seed = 0;

    /// "universal <tag>", "local <config>" or "adaptive <base_hash> <r_res> <n_snapshots> <seed>".
    std::string to_string() const;
    static Lineage parse(const std::string& text);
};

struct PodBasis {
    Eigen::MatrixXd U;                 // n x r, orthonormal columns
    Eigen::VectorXd singular_values;   // nonincreasing, length >= r
    Lineage lineage;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;

    Eigen::Index cells() const { return U.rows(); }
    Eigen::Index rank() const { return U.cols(); }
    /// Fingerprint of U and the retained singular values.
    std::string hash() const;
};

/// Hard floor for numerical rank: sigma_k <= 1e-12 * sigma_1 is treated as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Leading r left singular vectors of X by the method of snapshots: the
/// smaller Gram matrix (X^T X when m <= n, X X^T otherwise) is
/// eigendecomposed, then the factorization is refined by a QR / small-SVD
/// Rayleigh-Ritz pass so that small singular values keep full accuracy.
/// Column signs are normalized so the largest-magnitude entry is positive.
/// Throws RankDeficiency when r exceeds the numerical rank.
PodBasis compute_pod_basis(const Eigen::MatrixXd& X, int r, Lineage lineage = {});

/// All numerically nonzero singular values (and left vectors) of X, sorted.
struct ThinSvd {
    Eigen::MatrixXd U;
    Eigen::VectorXd sigma;
};
ThinSvd snapshot_svd(const Eigen::MatrixXd& X);

/// Flip column signs so each column's largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& U);

Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& state);
Eigen::VectorXd reconstruct(const PodBasis& basis, const Eigen::VectorXd& reduced);

/// Cumulative normalized energy sum_{i<=k} sigma_i^2 / sum_i sigma_i^2.
std::vector<double> energy_spectrum(const PodBasis& basis);

/// First columns of a basis (r <= basis.rank()).
PodBasis truncate(const PodBasis& basis, int r);

/// Identity basis I_n (used to validate the reduced model against the full one).
PodBasis identity_basis(int n);

// Basis file: "n r", r lines of sigma_k, U row-major (n lines of r values),
// then "provenance seed=<u64> config=<hex> lineage=<lineage string>", and an
// optional "tail k sigma..." line with the discarded singular values.
void write_basis(const std::filesystem::path& path, const PodBasis& basis);
PodBasis read_basis(const std::filesystem::path& path);
std::string basis_to_text(const PodBasis& basis);
PodBasis basis_from_text(const std::string& text);

// Snapshot file: "n m" then column-major values, then an optional
// "provenance scenario=<s> config=<hex> stride=<k> seed=<u64>" line.
void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots);
SnapshotMatrix read_snapshots(const std::filesystem::path& path);

}  // namespace adapod
