#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlsn {

// Errors thrown by the numeric core. The CLI maps these onto exit codes.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};
struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major tensor of doubles with an optional gradient buffer.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty unless gradients are requested

    Tensor() = default;
    Tensor(std::vector<std::size_t> shape_, std::vector<double> values_)
        : shape(std::move(shape_)), values(std::move(values_)) {
        if (values.size() != size_of(shape))
            throw ShapeError("tensor value count does not match shape");
    }

    static std::size_t size_of(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> shape) {
        std::size_t n = size_of(shape);
        return Tensor(std::move(shape), std::vector<double>(n, 0.0));
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    std::size_t size() const { return values.size(); }

    std::size_t rows() const {
        if (shape.size() != 2) throw ShapeError("rows() on non-matrix tensor");
        return shape[0];
    }
    std::size_t cols() const {
        if (shape.size() != 2) throw ShapeError("cols() on non-matrix tensor");
        return shape[1];
    }

    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    bool has_grad() const { return !grad.empty(); }
    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    }
    void zero_grad() { grad.assign(grad.size(), 0.0); }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

}  // namespace mlsn
