#include "meraclust/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef MERACLUST_USE_LAPACKE
#include <lapacke.h>
#endif

namespace meraclust::linalg {

namespace {

void apply_sign_convention(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < left.rows(); ++i) {
            const double a = std::abs(left(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (left(imax, j) < 0.0) {
            left.col(j) = -left.col(j);
            if (j < right.cols()) right.col(j) = -right.col(j);
        }
    }
}

#ifdef MERACLUST_USE_LAPACKE
// Divide-and-conquer thin SVD; falls back to Eigen if the driver fails.
bool lapack_svd(const Eigen::MatrixXd& m, Eigen::MatrixXd& u, Eigen::VectorXd& s,
                Eigen::MatrixXd& v) {
    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    const lapack_int r = std::min(rows, cols);
    Eigen::MatrixXd work = m;
    u.resize(rows, r);
    s.resize(r);
    Eigen::MatrixXd vt(r, cols);
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows, s.data(), u.data(),
                       rows, vt.data(), r);
    if (info != 0) return false;
    v = vt.transpose();
    return true;
}

bool lapack_sym_eig(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    w.resize(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    return info == 0;
}
#endif

}  // namespace

SvdFactors svd(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw std::runtime_error("svd: input contains non-finite values");
    SvdFactors f;
#ifdef MERACLUST_USE_LAPACKE
    if (!lapack_svd(m, f.left, f.singular_values, f.right))
#endif
    {
        Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        f.left = dec.matrixU();
        f.singular_values = dec.singularValues();
        f.right = dec.matrixV();
    }
    apply_sign_convention(f.left, f.right);
    return f;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig_smallest(const Eigen::MatrixXd& m,
                                                             Eigen::Index k) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sym_eig_smallest: matrix not square");
    const Eigen::Index n = m.rows();
    if (k < 1 || k > n)
        throw std::invalid_argument("sym_eig_smallest: k=" + std::to_string(k) +
                                    " out of range for n=" + std::to_string(n));
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("sym_eig_smallest: input is not symmetric within tolerance");

    Eigen::MatrixXd vecs = 0.5 * (m + m.transpose());
    Eigen::VectorXd vals;
#ifdef MERACLUST_USE_LAPACKE
    if (!lapack_sym_eig(vecs, vals))
#endif
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
        vals = es.eigenvalues();
        vecs = es.eigenvectors();
    }
    return {vals.head(k), vecs.leftCols(k)};
}

Eigen::MatrixXd procrustes_max(const Eigen::MatrixXd& g) {
    if (g.rows() < g.cols())
        throw std::invalid_argument("procrustes_max: need rows >= cols, got " +
                                    std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    const SvdFactors f = svd(g);
    return f.left * f.right.transpose();
}

GramSolver::GramSolver(const Eigen::MatrixXd& x) : n_(x.cols()) {
    if (!x.allFinite()) throw std::runtime_error("GramSolver: input contains non-finite values");
    if (x.rows() < x.cols()) {
        // x^T x has rank <= rows; eigendecompose the small x x^T and lift.
        thin_ = true;
        const Eigen::MatrixXd small = x * x.transpose();
        auto [vals, vecs] = sym_eig_smallest(small, small.rows());
        const double tol = std::max(vals.cwiseAbs().maxCoeff(), 1.0) * 1e-14 *
                           static_cast<double>(small.rows());
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < vals.size(); ++i)
            if (vals(i) > tol) keep.push_back(i);
        vals_.resize(static_cast<Eigen::Index>(keep.size()));
        vecs_.resize(n_, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            vals_(static_cast<Eigen::Index>(j)) = vals(keep[j]);
            vecs_.col(static_cast<Eigen::Index>(j)) =
                x.transpose() * vecs.col(keep[j]) / std::sqrt(vals(keep[j]));
        }
    } else {
        const Eigen::MatrixXd gram = x.transpose() * x;
        auto [vals, vecs] = sym_eig_smallest(gram, gram.rows());
        vals_ = vals.cwiseMax(0.0);
        vecs_ = vecs;
    }
}

Eigen::MatrixXd GramSolver::solve(double mu1, double mu2, const Eigen::MatrixXd& rhs) const {
    if (mu1 <= 0.0)
        throw std::invalid_argument("GramSolver::solve: mu1 must be positive, got " +
                                    std::to_string(mu1));
    if (rhs.rows() != n_)
        throw std::invalid_argument("GramSolver::solve: rhs row count mismatch");
    const Eigen::ArrayXd inv = 1.0 / (mu1 + mu2 * vals_.array());
    if (thin_) {
        // (mu1 I + mu2 x^T x)^{-1} = I/mu1 + V (inv - 1/mu1) V^T on the kept spectrum.
        Eigen::MatrixXd out = rhs / mu1;
        if (vals_.size() > 0) {
            const Eigen::VectorXd coeff = inv.matrix() - Eigen::VectorXd::Constant(vals_.size(), 1.0 / mu1);
            out.noalias() += vecs_ * (coeff.asDiagonal() * (vecs_.transpose() * rhs));
        }
        return out;
    }
    return vecs_ * (inv.matrix().asDiagonal() * (vecs_.transpose() * rhs));
}

Eigen::MatrixXd regularized_gram_solve(const Eigen::MatrixXd& x, double mu1, double mu2,
                                       const Eigen::MatrixXd& rhs) {
    return GramSolver(x).solve(mu1, mu2, rhs);
}

}  // namespace meraclust::linalg
