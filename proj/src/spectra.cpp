#include "ids/spectra.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "ids/errors.hpp"
#include "ids/rng.hpp"

namespace ids {

namespace {

[[noreturn]] void fail_with_dump(const SymmetricOperator& block) {
    const auto tag = rng::mix64(block.dimension() ^ (block.entries().size() << 20));
    auto path = std::filesystem::temp_directory_path() / ("ids_nonconverged_" + std::to_string(tag) + ".txt");
    std::ofstream(path) << block.to_coordinate_text();
    throw NumericalError("symmetric eigensolver did not converge on a block of dimension " +
                         std::to_string(block.dimension()) + "; matrix dumped to " + path.string());
}

void check_size(std::size_t n) {
    if (n > kDenseThreshold) {
        throw SizeError("irreducible block of dimension " + std::to_string(n) + " exceeds the dense threshold " +
                        std::to_string(kDenseThreshold));
    }
}

extern "C" void openblas_set_num_threads(int);

bool lapack_self_test();

// Realization loops are the parallel axis; every LAPACK call runs on one
// thread so results do not depend on the worker count. Some OpenBLAS kernel
// selections return wrong factorizations, so LAPACK is only used once it has
// reproduced a known decomposition; otherwise the Eigen solvers take over.
bool use_lapack() {
    static const bool ok = [] {
        openblas_set_num_threads(1);
        return lapack_self_test();
    }();
    return ok;
}

// Householder tridiagonalization followed by implicit-shift QL/QR (dsyev).
Eigen::VectorXd lapack_values(Eigen::MatrixXd a, const SymmetricOperator* block) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd w(n);
    lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info < 0) throw NumericalError("dsyev rejected argument " + std::to_string(-info));
    if (info > 0) {
        if (block) fail_with_dump(*block);
        throw NumericalError("dsyev did not converge");
    }
    return w;
}

// Same reduction; tridiagonal eigenpairs by relatively robust representations
// (dsyevr).
bool lapack_system(Eigen::MatrixXd a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    values.resize(n);
    vectors.resize(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0, &found,
                                     values.data(), vectors.data(), n, support.data());
    if (info < 0) throw NumericalError("dsyevr rejected argument " + std::to_string(-info));
    return info == 0 && found == n;
}

bool lapack_self_test() {
    // Pseudo-random symmetric matrix large enough to reach the blocked kernels.
    const Eigen::Index n = 320;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = rng::uniform(0x5eed, rng::Stream::geometry, static_cast<std::uint64_t>(i * n + j)) - 0.5;
            a(i, j) = a(j, i) = v;
        }
    }
    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    if (!lapack_system(a, w, v)) return false;
    const double scale = a.norm();
    if ((a * v - v * w.asDiagonal()).norm() > 1e-10 * scale) return false;
    if ((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-10 * static_cast<double>(n)) return false;
    Eigen::VectorXd only = lapack_values(a, nullptr);
    return (only - w).norm() <= 1e-10 * scale;
}

Eigen::VectorXd block_values(const SymmetricOperator& block) {
    if (use_lapack()) return lapack_values(block.dense(), &block);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail_with_dump(block);
    return solver.eigenvalues();
}

void block_system(const SymmetricOperator& block, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    if (use_lapack()) {
        if (!lapack_system(block.dense(), values, vectors)) fail_with_dump(block);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.dense(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) fail_with_dump(block);
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
}

}  // namespace

std::vector<double> eigenvalues(const SymmetricOperator& op) {
    std::vector<double> out;
    out.reserve(op.dimension());
    for (const auto& sites : op.blocks()) {
        check_size(sites.size());
        if (sites.size() == 1) {
            out.push_back(op.entry(sites[0], sites[0]));
            continue;
        }
        SymmetricOperator block = op.principal(sites);
        const Eigen::VectorXd v = block_values(block);
        out.insert(out.end(), v.data(), v.data() + v.size());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<BlockEigensystem> eigensystem(const SymmetricOperator& op) {
    std::vector<BlockEigensystem> out;
    for (auto& sites : op.blocks()) {
        check_size(sites.size());
        BlockEigensystem b;
        if (sites.size() == 1) {
            b.values = Eigen::VectorXd::Constant(1, op.entry(sites[0], sites[0]));
            b.vectors = Eigen::MatrixXd::Identity(1, 1);
        } else {
            SymmetricOperator block = op.principal(sites);
            block_system(block, b.values, b.vectors);
        }
        b.sites = std::move(sites);
        out.push_back(std::move(b));
    }
    return out;
}

std::string eigensolver_backend() { return use_lapack() ? "lapack" : "eigen"; }

double max_relative_residual(const SymmetricOperator& op, const std::vector<BlockEigensystem>& system) {
    const double norm = std::max(op.max_abs_row_sum(), 1.0);
    double worst = 0.0;
    for (const BlockEigensystem& b : system) {
        Eigen::MatrixXd h = op.principal(b.sites).dense();
        Eigen::MatrixXd r = h * b.vectors - b.vectors * b.values.asDiagonal();
        worst = std::max(worst, r.colwise().norm().maxCoeff() / norm);
    }
    return worst;
}

}  // namespace ids
