#include "aegis/tensor.hpp"

#include <numeric>

namespace aegis {

namespace {

std::size_t checked_volume(const std::vector<int>& shape) {
    if (shape.empty() || shape.size() > 4) {
        throw ShapeError("tensor rank must be 1..4, got " + Tensor::shape_str(shape));
    }
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) {
            throw ShapeError("tensor dims must be >= 1, got " + Tensor::shape_str(shape));
        }
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(checked_volume(shape_), 0.0f) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_volume(shape_) != data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
    }
}

std::string Tensor::shape_str(const std::vector<int>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    s += ")";
    return s;
}

}  // namespace aegis
