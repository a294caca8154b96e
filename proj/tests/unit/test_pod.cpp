#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "adapod/errors.hpp"
#include "adapod/pod.hpp"
#include "oracles.hpp"

using namespace adapod;

namespace {

Eigen::VectorXd geometric(int k, double first, double ratio) {
    Eigen::VectorXd s(k);
    for (int i = 0; i < k; ++i) s[i] = first * std::pow(ratio, i);
    return s;
}

double subspace_gap(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    return (oracle::projector(U) - oracle::projector(V)).norm();
}

std::filesystem::path temp(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Pod, DiagonalSnapshotsGiveCoordinateVectors) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 3);
    X.diagonal() << 3.0, 2.0, 1.0;
    const auto b = compute_pod_basis(X, 2);
    ASSERT_EQ(b.rank(), 2);
    EXPECT_LT((b.U - Eigen::MatrixXd::Identity(3, 2)).norm(), 1e-14);
    ASSERT_GE(b.singular_values.size(), 2);
    EXPECT_NEAR(b.singular_values[0], 3.0, 1e-14);
    EXPECT_NEAR(b.singular_values[1], 2.0, 1e-14);
}

TEST(Pod, RankOneSnapshots) {
    Eigen::VectorXd u(4), v(3);
    u << 1.0, -2.0, 0.5, 3.0;
    v << 2.0, 1.0, -1.0;
    const Eigen::MatrixXd X = u * v.transpose();
    const auto b = compute_pod_basis(X, 1);
    EXPECT_NEAR(b.singular_values[0], u.norm() * v.norm(), 1e-12);
    EXPECT_LT((b.U.col(0) - u.normalized()).norm(), 1e-13);  // largest entry positive
    EXPECT_THROW(compute_pod_basis(X, 2), RankDeficiency);
    EXPECT_THROW(compute_pod_basis(X, 0), InvalidArgument);
}

TEST(Pod, ZeroSnapshotsHaveNoRank) {
    EXPECT_THROW(compute_pod_basis(Eigen::MatrixXd::Zero(5, 3), 1), RankDeficiency);
}

TEST(Pod, MatchesJacobiSvdInBothOrientations) {
    std::mt19937_64 rng(11);
    for (auto [n, m] : {std::pair{60, 15}, std::pair{15, 40}}) {
        const int k = std::min(n, m);
        const Eigen::MatrixXd X = oracle::with_spectrum(n, m, geometric(k, 100.0, 0.6), rng);
        const int r = 6;
        const auto b = compute_pod_basis(X, r);
        const Eigen::VectorXd ref = oracle::singular_values(X);
        for (int i = 0; i < r; ++i) EXPECT_NEAR(b.singular_values[i], ref[i], 1e-10 * ref[i]);
        EXPECT_LT((b.U.transpose() * b.U - Eigen::MatrixXd::Identity(r, r)).norm(), 1e-12);
        EXPECT_LT(subspace_gap(b.U, oracle::leading_left_vectors(X, r)), 1e-9);
    }
}

TEST(Pod, TruncationErrorEqualsTailEnergy) {
    std::mt19937_64 rng(12);
    const Eigen::MatrixXd X = oracle::with_spectrum(80, 30, geometric(30, 10.0, 0.7), rng);
    const Eigen::VectorXd ref = oracle::singular_values(X);
    for (int r : {1, 5, 12}) {
        const auto b = compute_pod_basis(X, r);
        const double err = (X - b.U * (b.U.transpose() * X)).squaredNorm();
        const double tail = ref.tail(ref.size() - r).squaredNorm();
        EXPECT_NEAR(err, tail, 1e-9 * tail) << "r = " << r;
    }
}

TEST(Pod, SmallSingularValuesKeepRelativeAccuracy) {
    std::mt19937_64 rng(13);
    const Eigen::VectorXd sigma = geometric(12, 1.0, 0.15);  // down to about 1e-9
    const Eigen::MatrixXd X = oracle::with_spectrum(200, 40, sigma, rng);
    const auto b = compute_pod_basis(X, 10);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(b.singular_values[i], sigma[i], 1e-6 * sigma[i]) << "index " << i;
}

TEST(Pod, ProjectionProperties) {
    std::mt19937_64 rng(14);
    const Eigen::MatrixXd X = oracle::random_matrix(50, 20, rng);
    const auto b = compute_pod_basis(X, 8);
    const Eigen::VectorXd c = oracle::random_matrix(8, 1, rng);
    EXPECT_LT((project(b, reconstruct(b, c)) - c).norm(), 1e-12 * c.norm());
    const Eigen::VectorXd x = oracle::random_matrix(50, 1, rng);
    const Eigen::VectorXd px = reconstruct(b, project(b, x));
    EXPECT_LT((reconstruct(b, project(b, px)) - px).norm(), 1e-12 * x.norm());
    EXPECT_LT((b.U.transpose() * (x - px)).norm(), 1e-12 * x.norm());
    EXPECT_LE(px.norm(), x.norm() * (1.0 + 1e-12));
    EXPECT_THROW(project(b, Eigen::VectorXd::Zero(49)), DimensionMismatch);
    EXPECT_THROW(reconstruct(b, Eigen::VectorXd::Zero(7)), DimensionMismatch);
}

TEST(Pod, EnergySpectrumIsCumulative) {
    std::mt19937_64 rng(15);
    const Eigen::MatrixXd X = oracle::with_spectrum(30, 10, geometric(10, 5.0, 0.5), rng);
    const auto b = compute_pod_basis(X, 4);
    const auto e = energy_spectrum(b);
    ASSERT_FALSE(e.empty());
    for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GE(e[i], e[i - 1]);
    EXPECT_LE(e.back(), 1.0);
    const Eigen::VectorXd s = b.singular_values;
    EXPECT_NEAR(e[0], s[0] * s[0] / s.squaredNorm(), 1e-15);
}

TEST(Pod, SignsAreNormalized) {
    std::mt19937_64 rng(16);
    const auto b = compute_pod_basis(oracle::random_matrix(25, 9, rng), 5);
    for (Eigen::Index j = 0; j < b.rank(); ++j) {
        Eigen::Index i;
        b.U.col(j).cwiseAbs().maxCoeff(&i);
        EXPECT_GT(b.U(i, j), 0.0);
    }
    Eigen::MatrixXd flipped = -b.U;
    normalize_signs(flipped);
    EXPECT_EQ(flipped, b.U);
}

TEST(Pod, TruncateAndIdentity) {
    std::mt19937_64 rng(17);
    const auto b = compute_pod_basis(oracle::random_matrix(25, 9, rng), 6);
    const auto t = truncate(b, 3);
    EXPECT_EQ(t.U, b.U.leftCols(3));
    EXPECT_THROW(truncate(b, 7), InvalidArgument);
    const auto id = identity_basis(5);
    EXPECT_EQ(id.U, Eigen::MatrixXd::Identity(5, 5));
}

TEST(Pod, SnapshotMatrixStacksColumns) {
    std::vector<Eigen::VectorXd> states{Eigen::VectorXd::Constant(3, 1.0), Eigen::VectorXd::Constant(3, 2.0)};
    const auto s = build_snapshot_matrix(states, {});
    ASSERT_EQ(s.states(), 2);
    EXPECT_EQ(s.data.col(1), states[1]);
    states.push_back(Eigen::VectorXd::Zero(4));
    EXPECT_THROW(build_snapshot_matrix(states, {}), InvalidArgument);
    const SnapshotMatrix parts[] = {s, build_snapshot_matrix(std::span(states).first(1), {})};
    EXPECT_EQ(concatenate(parts).states(), 3);
    const SnapshotMatrix mismatched[] = {s, build_snapshot_matrix(std::span(states).subspan(2), {})};
    EXPECT_THROW(concatenate(mismatched), DimensionMismatch);
}

TEST(PodFiles, BasisRoundTripsBitExactly) {
    std::mt19937_64 rng(18);
    Lineage lin;
    lin.kind = LineageKind::adaptive;
    lin.base_hash = "0123abcd";
    lin.residual_components = 3;
    lin.new_snapshots = 10;
    lin.seed = 99;
    auto b = compute_pod_basis(oracle::random_matrix(30, 12, rng), 5, lin);
    b.seed = 42;
    b.config_hash = 0xfeedbeefULL;
    const auto path = temp("adapod_basis_test.txt");
    write_basis(path, b);
    const auto back = read_basis(path);
    EXPECT_EQ(back.U, b.U);
    EXPECT_EQ(back.singular_values, b.singular_values);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.config_hash, b.config_hash);
    EXPECT_EQ(back.lineage.to_string(), lin.to_string());
    EXPECT_EQ(back.hash(), b.hash());
    std::filesystem::remove(path);
}

TEST(PodFiles, SnapshotsRoundTripBitExactly) {
    std::mt19937_64 rng(19);
    SnapshotMatrix s;
    s.data = oracle::random_matrix(17, 4, rng) * 1e7;
    s.provenance = {"unit", 0xabcULL, 10, 5};
    const auto path = temp("adapod_snapshots_test.txt");
    write_snapshots(path, s);
    const auto back = read_snapshots(path);
    EXPECT_EQ(back.data, s.data);
    EXPECT_EQ(back.provenance.scenario, "unit");
    EXPECT_EQ(back.provenance.config_hash, 0xabcULL);
    EXPECT_EQ(back.provenance.stride, 10);
    EXPECT_EQ(back.provenance.seed, 5u);
    std::filesystem::remove(path);
}

TEST(PodFiles, MalformedBasisIsAParseError) {
    EXPECT_THROW(basis_from_text("3\n"), ParseError);
    EXPECT_THROW(basis_from_text("2 1\n1.0\n0.5 0.5\n"), ParseError);
    EXPECT_THROW(Lineage::parse("fancy x"), ParseError);
}

TEST(PodFiles, LineageStrings) {
    Lineage u;
    u.kind = LineageKind::universal;
    u.config = "tag";
    EXPECT_EQ(u.to_string(), "universal tag");
    EXPECT_EQ(Lineage::parse("local 00ff").config, "00ff");
    const auto a = Lineage::parse("adaptive abc 3 10 7");
    EXPECT_EQ(a.kind, LineageKind::adaptive);
    EXPECT_EQ(a.residual_components, 3);
    EXPECT_EQ(a.new_snapshots, 10);
    EXPECT_EQ(a.seed, 7u);
}
