#pragma once

#include <Eigen/Dense>
#include <utility>

namespace meraclust::linalg {

// Thin SVD m = left * diag(singular_values) * right^T with a deterministic
// sign convention: in each left singular vector the entry of largest
// magnitude (lowest index on ties) is nonnegative.
struct SvdFactors {
    Eigen::MatrixXd left;
    Eigen::VectorXd singular_values;  // nonincreasing, >= 0
    Eigen::MatrixXd right;
};

SvdFactors svd(const Eigen::MatrixXd& m);

// k smallest eigenpairs of a symmetric matrix, eigenvalues ascending.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig_smallest(const Eigen::MatrixXd& m,
                                                             Eigen::Index k);

// Maximizer of trace(Q^T g) over semi-orthogonal Q (p x q, p >= q): Q = S D^T
// from the SVD of g. The attained trace equals the sum of singular values.
Eigen::MatrixXd procrustes_max(const Eigen::MatrixXd& g);

// Solves (mu1 I + mu2 x^T x) Z = rhs through a cached symmetric
// eigendecomposition of x^T x, so repeated solves with changing penalties
// reuse the factorization. When x has fewer rows than columns the
// factorization goes through the small x x^T Gram matrix instead.
class GramSolver {
public:
    explicit GramSolver(const Eigen::MatrixXd& x);

    Eigen::MatrixXd solve(double mu1, double mu2, const Eigen::MatrixXd& rhs) const;

private:
    Eigen::Index n_ = 0;
    bool thin_ = false;           // factored via x x^T; spectrum completed by zeros
    Eigen::MatrixXd vecs_;        // n x r eigenvectors of x^T x
    Eigen::VectorXd vals_;        // matching eigenvalues, >= 0
};

Eigen::MatrixXd regularized_gram_solve(const Eigen::MatrixXd& x, double mu1, double mu2,
                                       const Eigen::MatrixXd& rhs);

}  // namespace meraclust::linalg
