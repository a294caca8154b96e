#include "adapod/pod.hpp"

#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace adapod {

SnapshotMatrix build_snapshot_matrix(std::span<const Eigen::VectorXd> states, SnapshotProvenance provenance) {
    if (states.empty()) throw InvalidArgument("snapshot list is empty");
    const Eigen::Index n = states.front().size();
    SnapshotMatrix out;
    out.data.resize(n, static_cast<Eigen::Index>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (states[j].size() != n)
            throw InvalidArgument("snapshot " + std::to_string(j) + " has length " + std::to_string(states[j].size()) +
                                  ", expected " + std::to_string(n));
        if (!states[j].allFinite()) throw InvalidArgument("snapshot " + std::to_string(j) + " is not finite");
        out.data.col(static_cast<Eigen::Index>(j)) = states[j];
    }
    out.provenance = std::move(provenance);
    return out;
}

SnapshotMatrix concatenate(std::span<const SnapshotMatrix> parts) {
    if (parts.empty()) throw InvalidArgument("nothing to concatenate");
    Eigen::Index cols = 0;
    for (const auto& p : parts) {
        if (p.data.rows() != parts.front().data.rows()) throw DimensionMismatch("snapshot matrices differ in row count");
        cols += p.data.cols();
    }
    SnapshotMatrix out;
    out.provenance = parts.front().provenance;
    out.data.resize(parts.front().data.rows(), cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.data.middleCols(at, p.data.cols()) = p.data;
        at += p.data.cols();
    }
    return out;
}

std::string Lineage::to_string() const {
    switch (kind) {
        case LineageKind::universal: return config.empty() ? "universal" : "universal " + config;
        case LineageKind::local: return config.empty() ? "local" : "local " + config;
        case LineageKind::adaptive:
            return "adaptive " + base_hash + ' ' + std::to_string(residual_components) + ' ' +
                   std::to_string(new_snapshots) + ' ' + std::to_string(seed);
    }
    return "local";
}

Lineage Lineage::parse(const std::string& text) {
    const auto tok = split_whitespace(text);
    if (tok.empty()) throw ParseError("empty lineage", 0, "lineage");
    Lineage l;
    if (tok[0] == "universal" || tok[0] == "local") {
        l.kind = tok[0] == "universal" ? LineageKind::universal : LineageKind::local;
        const auto pos = text.find(tok[0]) + tok[0].size();
        l.config = std::string(trim(std::string_view(text).substr(pos)));
    } else if (tok[0] == "adaptive") {
        if (tok.size() != 5) throw ParseError("adaptive lineage needs base r_res n_snapshots seed", 0, "lineage");
        l.kind = LineageKind::adaptive;
        l.base_hash = tok[1];
        l.residual_components = static_cast<int>(parse_integer(tok[2]));
        l.new_snapshots = static_cast<int>(parse_integer(tok[3]));
        l.seed = std::stoull(tok[4]);
    } else {
        throw ParseError("unknown lineage kind '" + tok[0] + "'", 0, "lineage");
    }
    return l;
}

std::string PodBasis::hash() const {
    std::uint64_t h = fnv1a(U.data(), static_cast<std::size_t>(U.size()) * sizeof(double));
    const Eigen::Index r = std::min<Eigen::Index>(U.cols(), singular_values.size());
    Eigen::VectorXd head = singular_values.head(r);
    h = fnv1a(head.data(), static_cast<std::size_t>(r) * sizeof(double), h);
    return hex64(h);
}

void normalize_signs(Eigen::MatrixXd& U) {
    for (Eigen::Index k = 0; k < U.cols(); ++k) {
        Eigen::Index imax = 0;
        U.col(k).cwiseAbs().maxCoeff(&imax);
        if (U(imax, k) < 0.0) U.col(k) = -U.col(k);
    }
}

ThinSvd snapshot_svd(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::Index m = X.cols();
    if (n == 0 || m == 0) throw InvalidArgument("snapshot matrix is empty");
    if (!X.allFinite()) throw InvalidArgument("snapshot matrix has non-finite entries");

    Eigen::MatrixXd U;
    Eigen::VectorXd sigma;
    if (m <= n) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
        if (eig.info() != Eigen::Success) throw Error("Gram eigendecomposition failed");
        const Eigen::MatrixXd V = eig.eigenvectors().rowwise().reverse();
        // X V spans range(X) exactly; re-factor it to recover small modes
        const Eigen::MatrixXd Y = X * V;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU);
        U = Q * svd.matrixU();
        sigma = svd.singularValues();
    } else {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(X);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
        if (eig.info() != Eigen::Success) throw Error("Gram eigendecomposition failed");
        const Eigen::MatrixXd U0 = eig.eigenvectors().rowwise().reverse();
        // X^T U0 = Q R  =>  X = U0 R^T Q^T, so left vectors of X are U0 * right vectors of R
        const Eigen::MatrixXd Y = X.transpose() * U0;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinV);
        U = U0 * svd.matrixV();
        sigma = svd.singularValues();
    }

    Eigen::Index rank = 0;
    if (sigma.size() > 0 && sigma[0] > 0.0)
        while (rank < sigma.size() && sigma[rank] > kRankTolerance * sigma[0]) ++rank;
    ThinSvd out{U.leftCols(rank), sigma.head(rank)};
    normalize_signs(out.U);
    return out;
}

PodBasis compute_pod_basis(const Eigen::MatrixXd& X, int r, Lineage lineage) {
    if (r < 1) throw InvalidArgument("number of POD components must be >= 1");
    ThinSvd svd = snapshot_svd(X);
    const auto rank = static_cast<int>(svd.sigma.size());
    if (r > rank)
        throw RankDeficiency("requested " + std::to_string(r) + " POD components but the snapshots have numerical rank " +
                                 std::to_string(rank) + "; achievable r = " + std::to_string(rank),
                             rank);
    PodBasis basis;
    basis.U = svd.U.leftCols(r);
    basis.singular_values = std::move(svd.sigma);
    basis.lineage = std::move(lineage);
    return basis;
}

Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& state) {
    if (state.size() != basis.U.rows())
        throw DimensionMismatch("state length " + std::to_string(state.size()) + " does not match basis rows " +
                                std::to_string(basis.U.rows()));
    return basis.U.transpose() * state;
}

Eigen::VectorXd reconstruct(const PodBasis& basis, const Eigen::VectorXd& reduced) {
    if (reduced.size() != basis.U.cols())
        throw DimensionMismatch("reduced length " + std::to_string(reduced.size()) + " does not match basis rank " +
                                std::to_string(basis.U.cols()));
    return basis.U * reduced;
}

std::vector<double> energy_spectrum(const PodBasis& basis) {
    const auto& s = basis.singular_values;
    std::vector<double> out(static_cast<std::size_t>(s.size()));
    const double total = s.squaredNorm();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        acc += s[k] * s[k];
        out[static_cast<std::size_t>(k)] = total > 0.0 ? acc / total : 0.0;
    }
    if (total > 0.0 && !out.empty()) out.back() = 1.0;
    return out;
}

PodBasis truncate(const PodBasis& basis, int r) {
    if (r < 1 || r > basis.rank()) throw InvalidArgument("cannot truncate basis of rank " + std::to_string(basis.rank()) +
                                                         " to " + std::to_string(r));
    PodBasis out = basis;
    out.U = basis.U.leftCols(r);
    return out;
}

PodBasis identity_basis(int n) {
    PodBasis b;
    b.U = Eigen::MatrixXd::Identity(n, n);
    b.singular_values = Eigen::VectorXd::Ones(n);
    b.lineage.kind = LineageKind::local;
    b.lineage.config = "identity";
    return b;
}

std::string basis_to_text(const PodBasis& basis) {
    std::ostringstream out;
    const Eigen::Index n = basis.U.rows();
    const Eigen::Index r = basis.U.cols();
    if (basis.singular_values.size() < r) throw InvalidArgument("basis has fewer singular values than columns");
    out << n << ' ' << r << '\n';
    for (Eigen::Index k = 0; k < r; ++k) out << format_double(basis.singular_values[k]) << '\n';
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < r; ++k) {
            if (k) out << ' ';
            out << format_double(basis.U(i, k));
        }
        out << '\n';
    }
    out << "provenance seed=" << basis.seed << " config=" << hex64(basis.config_hash)
        << " lineage=" << basis.lineage.to_string() << '\n';
    const Eigen::Index tail = basis.singular_values.size() - r;
    if (tail > 0) {
        out << "tail " << tail;
        for (Eigen::Index k = r; k < basis.singular_values.size(); ++k) out << ' ' << format_double(basis.singular_values[k]);
        out << '\n';
    }
    return out.str();
}

PodBasis basis_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw ParseError("basis file truncated at line " + std::to_string(line_no + 1), line_no + 1, "body");
        ++line_no;
        return line;
    };
    const auto header = split_whitespace(next_line());
    if (header.size() != 2) throw ParseError("basis header must be 'n r'", 1, "header");
    const auto n = static_cast<Eigen::Index>(parse_integer(header[0]));
    const auto r = static_cast<Eigen::Index>(parse_integer(header[1]));
    if (n < 1 || r < 0 || r > n) throw ParseError("invalid basis dimensions", 1, "header");

    PodBasis b;
    b.singular_values.resize(r);
    for (Eigen::Index k = 0; k < r; ++k) b.singular_values[k] = parse_double(next_line());
    b.U.resize(n, r);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto tok = split_whitespace(next_line());
        if (static_cast<Eigen::Index>(tok.size()) != r)
            throw ParseError("basis row " + std::to_string(i) + " has " + std::to_string(tok.size()) + " values", line_no, "U");
        for (Eigen::Index k = 0; k < r; ++k) b.U(i, k) = parse_double(tok[static_cast<std::size_t>(k)]);
    }
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t.starts_with("provenance ")) {
            const auto lpos = t.find(" lineage=");
            if (lpos == std::string_view::npos) throw ParseError("provenance line lacks lineage", line_no, "provenance");
            for (const auto& kv : split_whitespace(t.substr(0, lpos))) {
                if (kv.starts_with("seed=")) b.seed = std::stoull(kv.substr(5));
                else if (kv.starts_with("config=")) b.config_hash = std::stoull(kv.substr(7), nullptr, 16);
            }
            b.lineage = Lineage::parse(std::string(t.substr(lpos + 9)));
        } else if (t.starts_with("tail ")) {
            const auto tok = split_whitespace(t);
            const auto count = static_cast<Eigen::Index>(parse_integer(tok.at(1)));
            if (static_cast<Eigen::Index>(tok.size()) != count + 2) throw ParseError("tail count mismatch", line_no, "tail");
            Eigen::VectorXd all(r + count);
            all.head(r) = b.singular_values;
            for (Eigen::Index k = 0; k < count; ++k) all[r + k] = parse_double(tok[static_cast<std::size_t>(k + 2)]);
            b.singular_values = std::move(all);
        } else {
            throw ParseError("unexpected line in basis file", line_no, std::string(t.substr(0, t.find(' '))));
        }
    }
    return b;
}

void write_basis(const std::filesystem::path& path, const PodBasis& basis) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << basis_to_text(basis);
}

PodBasis read_basis(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read basis file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return basis_from_text(ss.str());
}

void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    const auto& X = snapshots.data;
    out << X.rows() << ' ' << X.cols() << '\n';
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i) out << format_double(X(i, j)) << '\n';
    const auto& p = snapshots.provenance;
    out << "provenance scenario=" << p.scenario << " config=" << hex64(p.config_hash) << " stride=" << p.stride
        << " seed=" << p.seed << '\n';
}

SnapshotMatrix read_snapshots(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read snapshot file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty snapshot file", 1, "header");
    const auto header = split_whitespace(line);
    if (header.size() != 2) throw ParseError("snapshot header must be 'n m'", 1, "header");
    const auto n = static_cast<Eigen::Index>(parse_integer(header[0]));
    const auto m = static_cast<Eigen::Index>(parse_integer(header[1]));
    SnapshotMatrix s;
    s.data.resize(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw ParseError("snapshot file truncated", 0, "values");
            s.data(i, j) = parse_double(line);
        }
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (!t.starts_with("provenance ")) continue;
        for (const auto& kv : split_whitespace(t)) {
            if (kv.starts_with("scenario=")) s.provenance.scenario = kv.substr(9);
            else if (kv.starts_with("config=")) s.provenance.config_hash = std::stoull(kv.substr(7), nullptr, 16);
            else if (kv.starts_with("stride=")) s.provenance.stride = static_cast<int>(parse_integer(kv.substr(7)));
            else if (kv.starts_with("seed=")) s.provenance.seed = std::stoull(kv.substr(5));
        }
    }
    return s;
}

}  // namespace adapod
