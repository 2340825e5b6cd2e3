#pragma once

#include <cassert>
#include <span>
#include <vector>

#include "termlab/core/rng.hpp"

namespace termlab {

/// Dense row-major matrix of doubles. Vectors are rows == n, cols == 1
/// or 1 x n as convenient; only total layout matters to consumers.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    std::size_t size() const { return data.size(); }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    std::span<double> row(int r) {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    void fill(double v) { data.assign(data.size(), v); }

    static Tensor uniform(int r, int c, double scale, Rng& rng) {
        Tensor t(r, c);
        for (double& x : t.data) x = rng.uniform(-scale, scale);
        return t;
    }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace termlab
