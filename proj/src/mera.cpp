#include "meraclust/mera.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "meraclust/linalg.hpp"

namespace meraclust::mera {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using tensor::Shape;

Shape to_shape(const std::array<Index, 5>& dims) {
    return Shape(dims.begin(), dims.end());
}

void check_rank_bounds(const std::array<Index, 5>& d, Index rank) {
    if (rank < 1) throw std::invalid_argument("MERA rank must be >= 1");
    const Index split12 = d[0] * d[1];
    const Index split345 = d[2] * d[3] * d[4];
    if (rank > split12)
        throw std::invalid_argument("MERA rank " + std::to_string(rank) +
                                    " exceeds I1*I2 = " + std::to_string(split12));
    if (rank > split345)
        throw std::invalid_argument("MERA rank " + std::to_string(rank) +
                                    " exceeds I3*I4*I5 = " + std::to_string(split345));
}

void check_y_shape(const DenseTensor& y, const Mera5Network& net, const char* who) {
    if (y.order() != 5)
        throw std::invalid_argument(std::string(who) + ": input tensor must be 5th-order");
    for (int m = 0; m < 5; ++m)
        if (y.dim(m) != net.leg_dims[static_cast<std::size_t>(m)])
            throw std::invalid_argument(std::string(who) + ": tensor shape does not match network leg dims");
}

MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

// Thin Q of a Gaussian draw with the R-diagonal sign fix, so the result is a
// deterministic sample of the first `cols` columns of a random orthogonal matrix.
MatrixXd random_orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
    const MatrixXd g = gaussian(rows, cols, rng);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
    const VectorXd diag = qr.matrixQR().diagonal();
    for (Index j = 0; j < cols; ++j)
        if (diag(j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

// Zero-copy views of the constrained unfoldings (canonical layout makes the
// grouped-leg matricizations plain reinterpretations of the flat data).
Eigen::Map<const MatrixXd> w1_matrix(const Mera5Network& net) {
    return {net.w1.data(), net.leg_dims[0] * net.leg_dims[1], net.rank};
}

Eigen::Map<const MatrixXd> w2_matrix(const Mera5Network& net) {
    return {net.w2.data(), net.leg_dims[2] * net.leg_dims[3] * net.leg_dims[4], net.rank};
}

Eigen::Map<const MatrixXd> u1_matrix(const Mera5Network& net) {
    const Index n = net.leg_dims[1] * net.leg_dims[2];
    return {net.u1.data(), n, n};
}

DenseTensor tensor_from_matrix(Shape shape, const MatrixXd& m) {
    return DenseTensor(std::move(shape), VectorXd::Map(m.data(), m.size()));
}

// Contraction of the top core into both isometries, as the (I1 I2) x (I3 I4 I5)
// matrix whose canonical fold has legs (I1, I2', I3', I4, I5).
MatrixXd core_with_isometries(const Mera5Network& net) {
    return w1_matrix(net) * net.b * w2_matrix(net).transpose();
}

// Data rotated into the disentangled frame: fold_{2,3}(U1^T Y_(2,3)),
// returned as its {1,2} unfolding (I1 I2) x (I3 I4 I5).
MatrixXd rotated_data_12(const DenseTensor& y, const Mera5Network& net) {
    const MatrixXd y23 = tensor::unfold(y, 1, 2);
    const MatrixXd t23 = u1_matrix(net).transpose() * y23;
    const DenseTensor rotated = tensor::fold(t23, 1, 2, y.shape());
    return tensor::unfold(rotated, 0, 1);
}

double fit_error(const DenseTensor& y, const Mera5Network& net) {
    const DenseTensor recon = reconstruct(net);
    return (y.values() - recon.values()).norm();
}

}  // namespace

Mera5Network init_network(const std::array<Index, 5>& leg_dims, Index rank, std::uint64_t seed) {
    for (Index d : leg_dims)
        if (d < 1) throw std::invalid_argument("init_network: leg dims must be positive");
    check_rank_bounds(leg_dims, rank);
    std::mt19937_64 rng(seed);

    Mera5Network net;
    net.leg_dims = leg_dims;
    net.rank = rank;
    const Index i1 = leg_dims[0], i2 = leg_dims[1], i3 = leg_dims[2], i4 = leg_dims[3],
                i5 = leg_dims[4];
    net.u1 = tensor_from_matrix({i2, i3, i2, i3}, random_orthonormal(i2 * i3, i2 * i3, rng));
    net.w1 = tensor_from_matrix({i1, i2, rank}, random_orthonormal(i1 * i2, rank, rng));
    net.w2 = tensor_from_matrix({i3, i4, i5, rank}, random_orthonormal(i3 * i4 * i5, rank, rng));
    net.b = gaussian(rank, rank, rng);
    return net;
}

Mera5Network spectral_init_network(const DenseTensor& y, Index rank) {
    if (y.order() != 5)
        throw std::invalid_argument("spectral_init_network: input tensor must be 5th-order");
    std::array<Index, 5> dims{};
    for (int m = 0; m < 5; ++m) dims[static_cast<std::size_t>(m)] = y.dim(m);
    check_rank_bounds(dims, rank);

    Mera5Network net;
    net.leg_dims = dims;
    net.rank = rank;
    const Index i2 = dims[1], i3 = dims[2];
    net.u1 = tensor_from_matrix({i2, i3, i2, i3}, MatrixXd::Identity(i2 * i3, i2 * i3));
    const MatrixXd y12 = tensor::unfold(y, 0, 1);
    const linalg::SvdFactors f = linalg::svd(y12);
    const Index have = f.singular_values.size();
    MatrixXd w1m = MatrixXd::Zero(y12.rows(), rank);
    MatrixXd w2m = MatrixXd::Zero(y12.cols(), rank);
    const Index take = std::min(rank, have);
    w1m.leftCols(take) = f.left.leftCols(take);
    w2m.leftCols(take) = f.right.leftCols(take);
    if (take < rank) {
        // Complete with deterministic orthonormal columns when the data rank
        // is below R (singular vectors from dgesdd already span; this path
        // only triggers for degenerate thin inputs).
        std::mt19937_64 rng(0);
        const MatrixXd fill1 = random_orthonormal(y12.rows(), rank, rng);
        const MatrixXd fill2 = random_orthonormal(y12.cols(), rank, rng);
        w1m.rightCols(rank - take) = fill1.rightCols(rank - take);
        w2m.rightCols(rank - take) = fill2.rightCols(rank - take);
    }
    net.w1 = tensor_from_matrix({dims[0], dims[1], rank}, w1m);
    net.w2 = tensor_from_matrix({dims[2], dims[3], dims[4], rank}, w2m);
    net.b = w1m.transpose() * y12 * w2m;
    return net;
}

DenseTensor reconstruct(const Mera5Network& net) {
    const Shape shape = to_shape(net.leg_dims);
    const DenseTensor m_u = tensor::fold(core_with_isometries(net), 0, 1, shape);
    const MatrixXd m23 = tensor::unfold(m_u, 1, 2);
    const MatrixXd r23 = u1_matrix(net) * m23;
    return tensor::fold(r23, 1, 2, shape);
}

Mera5Network update_disentangler(const DenseTensor& y, const Mera5Network& net) {
    check_y_shape(y, net, "update_disentangler");
    const Shape shape = to_shape(net.leg_dims);
    const DenseTensor m_u = tensor::fold(core_with_isometries(net), 0, 1, shape);
    const MatrixXd m23 = tensor::unfold(m_u, 1, 2);
    const MatrixXd y23 = tensor::unfold(y, 1, 2);
    const MatrixXd g = y23 * m23.transpose();
    Mera5Network out = net;
    const Index i2 = net.leg_dims[1], i3 = net.leg_dims[2];
    out.u1 = tensor_from_matrix({i2, i3, i2, i3}, linalg::procrustes_max(g));
    return out;
}

Mera5Network update_isometry(const DenseTensor& y, const Mera5Network& net, int which) {
    check_y_shape(y, net, "update_isometry");
    if (which != 1 && which != 2)
        throw std::invalid_argument("update_isometry: which must be 1 or 2");
    const MatrixXd yt12 = rotated_data_12(y, net);
    Mera5Network out = net;
    if (which == 1) {
        const MatrixXd m_w1 = net.b * w2_matrix(net).transpose();  // R x (I3 I4 I5)
        const MatrixXd g = yt12 * m_w1.transpose();
        out.w1 = tensor_from_matrix({net.leg_dims[0], net.leg_dims[1], net.rank},
                                    linalg::procrustes_max(g));
    } else {
        const MatrixXd m_w2 = w1_matrix(net) * net.b;  // (I1 I2) x R
        const MatrixXd g = yt12.transpose() * m_w2;
        out.w2 = tensor_from_matrix({net.leg_dims[2], net.leg_dims[3], net.leg_dims[4], net.rank},
                                    linalg::procrustes_max(g));
    }
    return out;
}

Mera5Network update_top_core(const DenseTensor& y, const Mera5Network& net) {
    check_y_shape(y, net, "update_top_core");
    const MatrixXd yt12 = rotated_data_12(y, net);
    Mera5Network out = net;
    out.b = w1_matrix(net).transpose() * yt12 * w2_matrix(net);
    return out;
}

MeraResult approximate(const DenseTensor& y, const MeraConfig& cfg) {
    if (y.order() != 5) throw std::invalid_argument("approximate: input tensor must be 5th-order");
    if (cfg.sweeps < 1) throw std::invalid_argument("approximate: sweeps must be >= 1");
    std::array<Index, 5> dims{};
    for (int m = 0; m < 5; ++m) dims[static_cast<std::size_t>(m)] = y.dim(m);
    check_rank_bounds(dims, cfg.rank);

    Mera5Network net;
    if (cfg.warm_start) {
        net = *cfg.warm_start;
        if (net.leg_dims != dims || net.rank != cfg.rank)
            throw std::invalid_argument("approximate: warm-start network does not match input");
    } else {
        net = init_network(dims, cfg.rank, cfg.seed);
    }

    const double ynorm = y.values().norm();
    MeraTrace trace;
    trace.fit_errors.reserve(static_cast<std::size_t>(cfg.sweeps));
    // After the top-core update the residual satisfies
    // ||y - f||^2 = ||y||^2 - ||B||^2 exactly; the difference cancels badly
    // once the fit is nearly exact, so small errors switch to the explicit
    // residual. The trace is nonincreasing, hence the switch happens once.
    bool explicit_error = false;
    for (int s = 0; s < cfg.sweeps; ++s) {
        net = update_disentangler(y, net);
        net = update_isometry(y, net, 1);
        net = update_isometry(y, net, 2);
        net = update_top_core(y, net);
        double err;
        if (!explicit_error) {
            const double e2 = ynorm * ynorm - net.b.squaredNorm();
            err = std::sqrt(std::max(e2, 0.0));
            if (err < 1e-5 * ynorm) explicit_error = true;
        }
        if (explicit_error) err = fit_error(y, net);
        trace.fit_errors.push_back(err);
    }
    return {net, reconstruct(net), std::move(trace)};
}

}  // namespace meraclust::mera
