#pragma once

#include <vector>

#include "mph/common.hpp"

namespace mph {

// Dense row-major array of doubles. The substrate of every network and
// table in the project; invariant: product(shape) == data.size() and all
// entries stay finite through public ops.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);
    Tensor(std::vector<int> s, std::vector<double> d);

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    int numel() const { return static_cast<int>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }

    // 2-D accessors; shape checked on construction, not per call.
    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }
    double& operator[](int i) { return data[i]; }
    double operator[](int i) const { return data[i]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    void fill(double v);
};

// Throws DomainError naming `what` if any entry is NaN or infinite.
void check_finite(const Tensor& t, const char* what);
void check_finite(const std::vector<double>& v, const char* what);

}  // namespace mph
