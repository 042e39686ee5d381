#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aegis/error.hpp"

namespace aegis {

// Dense float32 n-d array, rank 1..4, row-major with the last dimension
// fastest. Images are (height, width, channels); conv kernels are
// (kh, kw, in_ch, out_ch). Immutable by convention once built: every op
// returns a fresh tensor.
class Tensor {
public:
    Tensor() = default;

    // Zero-filled.
    explicit Tensor(std::vector<int> shape);

    Tensor(std::vector<int> shape, std::vector<float> data);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    // Rank-3 (H, W, C) accessors.
    int height() const { return shape_[0]; }
    int width() const { return shape_[1]; }
    int channels() const { return shape_[rank() - 1]; }

    float at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * shape_[1] + x) * shape_[2] + c];
    }
    float& at(int y, int x, int c) {
        return data_[(static_cast<std::size_t>(y) * shape_[1] + x) * shape_[2] + c];
    }

    // Rank-4 accessor (e.g. kernel (kh, kw, in_ch, out_ch)).
    float at4(int a, int b, int c, int d) const {
        return data_[((static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] + c) *
                         shape_[3] +
                     d];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    static std::string shape_str(const std::vector<int>& shape);
    std::string shape_str() const { return shape_str(shape_); }

private:
    std::vector<int> shape_;
    std::vector<float> data_;
};

enum class Padding { SameZero, Valid };

struct ConvParams {
    Tensor kernel;  // (kh, kw, in_ch, out_ch), kh/kw odd
    Tensor bias;    // (out_ch)
    int stride = 1;
    Padding padding = Padding::SameZero;
};

struct BatchNormParams {
    Tensor gamma;
    Tensor beta;
    Tensor running_mean;
    Tensor running_var;  // elementwise >= 0
    float epsilon = 1e-5f;
};

}  // namespace aegis
