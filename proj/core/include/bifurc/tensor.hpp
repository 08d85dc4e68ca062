#ifndef BIFURC_TENSOR_HPP
#define BIFURC_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bifurc/errors.hpp"

namespace bifurc {

inline std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

// Dense row-major array with an explicit shape. data.size() == product(shape)
// holds from construction onward; reshape() preserves it.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;

    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(checked_numel(shape), T(0));
    }

    Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != checked_numel(shape))
            throw dimension_error("tensor data length " + std::to_string(data.size()) +
                                  " does not match shape " + shape_str(shape));
    }

    static std::size_t checked_numel(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) {
            if (d <= 0) throw dimension_error("non-positive dimension in shape " + shape_str(s));
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::size_t numel() const { return data.size(); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    // 2-d and 3-d indexing helpers for the common layouts
    T& at(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
    const T& at(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
    T& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
    }
    const T& at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    void reshape(std::vector<int> s) {
        if (checked_numel(s) != data.size())
            throw dimension_error("reshape " + shape_str(shape) + " -> " + shape_str(s) +
                                  " changes element count");
        shape = std::move(s);
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    static Tensor full(std::vector<int> s, T v) {
        Tensor t(std::move(s));
        t.fill(v);
        return t;
    }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

} // namespace bifurc

#endif
