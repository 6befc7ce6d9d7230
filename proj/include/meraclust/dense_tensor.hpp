#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace meraclust::tensor {

using Index = std::int64_t;
using Shape = std::vector<Index>;

// Dense real-valued multi-way array in canonical layout: the first index
// varies fastest, matching column-major order for matrices. All values are
// finite by construction and immutable afterwards.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);                       // zero-filled
    DenseTensor(Shape shape, Eigen::VectorXd data);          // validates size and finiteness

    static DenseTensor zeros(Shape shape) { return DenseTensor(std::move(shape)); }

    const Shape& shape() const { return shape_; }
    Index order() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return data_.size(); }
    Index dim(Index mode) const { return shape_.at(static_cast<std::size_t>(mode)); }

    const Eigen::VectorXd& values() const { return data_; }
    const double* data() const { return data_.data(); }

    double at(std::span<const Index> idx) const;

    template <typename... Is>
    double operator()(Is... idx) const {
        const Index buf[] = {static_cast<Index>(idx)...};
        return at(std::span<const Index>(buf, sizeof...(Is)));
    }

private:
    Shape shape_;
    Eigen::VectorXd data_;
};

Index shape_numel(const Shape& shape);

// Mode-pair matricization: rows enumerate (i_d1, i_d2) with i_d1 fastest,
// columns enumerate the remaining modes in ascending mode order, earliest
// mode fastest. Modes are zero-based with d1 < d2.
Eigen::MatrixXd unfold(const DenseTensor& t, Index d1, Index d2);

// Exact inverse of unfold under the same ordering.
DenseTensor fold(const Eigen::MatrixXd& m, Index d1, Index d2, const Shape& shape);

// Reinterprets the flat data under a new shape with the same element count.
DenseTensor reshape(const DenseTensor& t, Shape new_shape);

// Reorders modes: out mode k = in mode perm[k].
DenseTensor permute_modes(const DenseTensor& t, std::span<const Index> perm);

// Contracts the listed mode pairs; output modes are a's free modes in
// ascending order followed by b's free modes in ascending order.
DenseTensor contract(const DenseTensor& a, std::span<const Index> a_modes,
                     const DenseTensor& b, std::span<const Index> b_modes);

struct TensorNorms {
    double frobenius = 0.0;
    double max_abs = 0.0;
};

TensorNorms norms(const DenseTensor& t);

}  // namespace meraclust::tensor
