#include "meraclust/dense_tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace meraclust::tensor {

namespace {

void check_shape(const Shape& shape) {
    for (Index d : shape) {
        if (d <= 0)
            throw std::invalid_argument("tensor shape must have positive dimensions, got " +
                                        std::to_string(d));
    }
}

Shape strides_of(const Shape& shape) {
    Shape s(shape.size());
    Index acc = 1;
    for (std::size_t m = 0; m < shape.size(); ++m) {
        s[m] = acc;
        acc *= shape[m];
    }
    return s;
}

// Walks the source linearly while maintaining the destination offset through a
// mixed-radix counter; dst_stride[m] is the destination step when digit m ticks.
template <typename Fn>
void linear_walk(const Shape& shape, const Shape& dst_stride, Fn&& emit) {
    const auto order = shape.size();
    Shape digits(order, 0);
    Index total = 1;
    for (Index d : shape) total *= d;
    Index off = 0;
    for (Index lin = 0; lin < total; ++lin) {
        emit(lin, off);
        for (std::size_t m = 0; m < order; ++m) {
            off += dst_stride[m];
            if (++digits[m] < shape[m]) break;
            digits[m] = 0;
            off -= dst_stride[m] * shape[m];
        }
    }
}

}  // namespace

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_ = Eigen::VectorXd::Zero(shape_numel(shape_));
}

DenseTensor::DenseTensor(Shape shape, Eigen::VectorXd data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (shape_numel(shape_) != data_.size())
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                    " does not match shape element count " +
                                    std::to_string(shape_numel(shape_)));
    if (!data_.allFinite())
        throw std::invalid_argument("tensor data contains non-finite values");
}

double DenseTensor::at(std::span<const Index> idx) const {
    if (static_cast<Index>(idx.size()) != order())
        throw std::invalid_argument("index rank does not match tensor order");
    Index off = 0, stride = 1;
    for (std::size_t m = 0; m < idx.size(); ++m) {
        if (idx[m] < 0 || idx[m] >= shape_[m])
            throw std::invalid_argument("tensor index out of range in mode " + std::to_string(m));
        off += idx[m] * stride;
        stride *= shape_[m];
    }
    return data_[off];
}

Index shape_numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

namespace {

// Destination strides for the mode-pair unfolding of `shape`.
Shape unfold_strides(const Shape& shape, Index d1, Index d2, Index& rows, Index& cols) {
    const Index order = static_cast<Index>(shape.size());
    if (d1 < 0 || d2 >= order || d1 >= d2)
        throw std::invalid_argument("unfold modes must satisfy 0 <= d1 < d2 < order, got d1=" +
                                    std::to_string(d1) + " d2=" + std::to_string(d2) +
                                    " order=" + std::to_string(order));
    rows = shape[d1] * shape[d2];
    cols = 1;
    Shape dst(shape.size(), 0);
    dst[d1] = 1;
    dst[d2] = shape[d1];
    Index col_stride = 1;
    for (Index m = 0; m < order; ++m) {
        if (m == d1 || m == d2) continue;
        dst[m] = rows * col_stride;
        col_stride *= shape[m];
        cols *= shape[m];
    }
    return dst;
}

}  // namespace

Eigen::MatrixXd unfold(const DenseTensor& t, Index d1, Index d2) {
    Index rows = 0, cols = 0;
    const Shape dst = unfold_strides(t.shape(), d1, d2, rows, cols);
    Eigen::MatrixXd out(rows, cols);
    const double* src = t.data();
    double* dptr = out.data();
    linear_walk(t.shape(), dst, [&](Index lin, Index off) { dptr[off] = src[lin]; });
    return out;
}

DenseTensor fold(const Eigen::MatrixXd& m, Index d1, Index d2, const Shape& shape) {
    check_shape(shape);
    Index rows = 0, cols = 0;
    const Shape dst = unfold_strides(shape, d1, d2, rows, cols);
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument("fold: matrix is " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + " but shape implies " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    Eigen::VectorXd data(shape_numel(shape));
    const double* src = m.data();
    double* dptr = data.data();
    linear_walk(shape, dst, [&](Index lin, Index off) { dptr[lin] = src[off]; });
    return DenseTensor(shape, std::move(data));
}

DenseTensor reshape(const DenseTensor& t, Shape new_shape) {
    check_shape(new_shape);
    if (shape_numel(new_shape) != t.size())
        throw std::invalid_argument("reshape: element count mismatch (" +
                                    std::to_string(t.size()) + " vs " +
                                    std::to_string(shape_numel(new_shape)) + ")");
    return DenseTensor(std::move(new_shape), t.values());
}

DenseTensor permute_modes(const DenseTensor& t, std::span<const Index> perm) {
    const Index order = t.order();
    if (static_cast<Index>(perm.size()) != order)
        throw std::invalid_argument("permute_modes: permutation length mismatch");
    std::vector<bool> seen(perm.size(), false);
    for (Index p : perm) {
        if (p < 0 || p >= order || seen[static_cast<std::size_t>(p)])
            throw std::invalid_argument("permute_modes: invalid permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }
    const Shape in_stride = strides_of(t.shape());
    Shape out_shape(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        out_shape[k] = t.shape()[static_cast<std::size_t>(perm[k])];
    // Walk the output linearly; dst strides map output digits into the source.
    Shape src_stride(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        src_stride[k] = in_stride[static_cast<std::size_t>(perm[k])];
    Eigen::VectorXd data(t.size());
    const double* src = t.data();
    double* dptr = data.data();
    linear_walk(out_shape, src_stride, [&](Index lin, Index off) { dptr[lin] = src[off]; });
    return DenseTensor(std::move(out_shape), std::move(data));
}

DenseTensor contract(const DenseTensor& a, std::span<const Index> a_modes,
                     const DenseTensor& b, std::span<const Index> b_modes) {
    if (a_modes.size() != b_modes.size())
        throw std::invalid_argument("contract: mode lists differ in length");
    auto validate = [](const DenseTensor& t, std::span<const Index> modes) {
        std::vector<bool> seen(static_cast<std::size_t>(t.order()), false);
        for (Index m : modes) {
            if (m < 0 || m >= t.order() || seen[static_cast<std::size_t>(m)])
                throw std::invalid_argument("contract: invalid or repeated mode index");
            seen[static_cast<std::size_t>(m)] = true;
        }
    };
    validate(a, a_modes);
    validate(b, b_modes);
    Index inner = 1;
    for (std::size_t k = 0; k < a_modes.size(); ++k) {
        if (a.dim(a_modes[k]) != b.dim(b_modes[k]))
            throw std::invalid_argument(
                "contract: dimension mismatch between mode " + std::to_string(a_modes[k]) +
                " of a and mode " + std::to_string(b_modes[k]) + " of b");
        inner *= a.dim(a_modes[k]);
    }

    auto free_modes = [](const DenseTensor& t, std::span<const Index> modes) {
        std::vector<bool> used(static_cast<std::size_t>(t.order()), false);
        for (Index m : modes) used[static_cast<std::size_t>(m)] = true;
        Shape free;
        for (Index m = 0; m < t.order(); ++m)
            if (!used[static_cast<std::size_t>(m)]) free.push_back(m);
        return free;
    };
    const Shape a_free = free_modes(a, a_modes);
    const Shape b_free = free_modes(b, b_modes);

    // Permute so the contracted modes sit last in a and first in b, then the
    // contraction is one matrix product in canonical layout.
    Shape a_perm(a_free);
    a_perm.insert(a_perm.end(), a_modes.begin(), a_modes.end());
    Shape b_perm(b_modes.begin(), b_modes.end());
    b_perm.insert(b_perm.end(), b_free.begin(), b_free.end());

    const DenseTensor ap = permute_modes(a, a_perm);
    const DenseTensor bp = permute_modes(b, b_perm);

    Index a_rows = a.size() / inner;
    Index b_cols = b.size() / inner;
    Eigen::Map<const Eigen::MatrixXd> am(ap.data(), a_rows, inner);
    Eigen::Map<const Eigen::MatrixXd> bm(bp.data(), inner, b_cols);
    Eigen::MatrixXd cm = am * bm;

    Shape out_shape;
    out_shape.reserve(a_free.size() + b_free.size());
    for (Index m : a_free) out_shape.push_back(a.dim(m));
    for (Index m : b_free) out_shape.push_back(b.dim(m));
    if (out_shape.empty()) out_shape.push_back(1);  // full contraction yields a scalar
    return DenseTensor(std::move(out_shape),
                       Eigen::VectorXd::Map(cm.data(), cm.size()));
}

TensorNorms norms(const DenseTensor& t) {
    TensorNorms n;
    if (t.size() == 0) return n;
    n.frobenius = t.values().norm();
    n.max_abs = t.values().cwiseAbs().maxCoeff();
    return n;
}

}  // namespace meraclust::tensor
