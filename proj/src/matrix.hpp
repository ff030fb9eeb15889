#ifndef CONCSE_MATRIX_HPP
#define CONCSE_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "util.hpp"

namespace concse {

// Dense row-major matrix of doubles. Loss and encoder shapes here are tiny
// (N x d with N <= a few hundred), so plain loops are all we need.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    void add_scaled(const Matrix& other, double scale) {
        CONCSE_CHECK(same_shape(other), "matrix shape mismatch in add_scaled");
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += scale * other.data[i];
    }

    void scale(double factor) {
        for (double& v : data) v *= factor;
    }
};

}  // namespace concse

#endif  // CONCSE_MATRIX_HPP
