#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "proboost/errors.hpp"

namespace proboost {

/// Dense row-major tensor of 64-bit floats. Shape dims are all >= 1 and
/// product(shape) always equals data().size().
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Rank-2 accessors; no bounds check in release builds.
    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Same data, new shape; total size must be preserved.
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

    void fill(double v);

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// C[m,n] = A[m,k] * B[k,n]
Tensor matmul(const Tensor& a, const Tensor& b);
/// C[m,n] = A[k,m]^T * B[k,n]
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// C[m,n] = A[m,k] * B[n,k]^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);

std::size_t shape_product(const std::vector<std::size_t>& shape);

}  // namespace proboost
