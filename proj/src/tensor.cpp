#include "mph/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace mph {

namespace {

size_t product(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeError("negative dimension in tensor shape");
        n *= static_cast<size_t>(d);
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(product(shape), 0.0);
}

Tensor::Tensor(std::vector<int> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
    if (product(shape) != data.size()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape product " +
                         std::to_string(product(shape)));
    }
}

void Tensor::fill(double v) {
    for (double& x : data) x = v;
}

void check_finite(const Tensor& t, const char* what) {
    check_finite(t.data, what);
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DomainError(std::string("non-finite value in ") + what);
        }
    }
}

}  // namespace mph
