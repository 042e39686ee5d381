#pragma once

#include "aegis/tensor.hpp"

namespace aegis {

// Fixed operator set for TimeConvNet graphs. All kernels are pure, single
// threaded, and accumulate in float64 with a fixed reduction order
// (kh -> kw -> c), so identical inputs give bitwise identical outputs on
// every run and thread count.

// Spatial dims: same_zero pads (k-1)/2 per side -> ceil(H/stride);
// valid pads nothing -> floor((H-kh)/stride)+1.
Tensor conv2d(const Tensor& input, const ConvParams& p);

// out[...,c] = gamma[c] * (x - mean[c]) / sqrt(var[c] + eps) + beta[c]
Tensor batchnorm_infer(const Tensor& input, const BatchNormParams& p);

Tensor relu(const Tensor& input);

Tensor add(const Tensor& a, const Tensor& b);

// (H, W, C) -> (1, 1, C) arithmetic mean per channel.
Tensor global_avg_pool(const Tensor& input);

// (1, 1, C) x (C, K) + (K) -> (1, 1, K)
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

// Max-subtracted, double-precision exp; output sums to 1 within 1e-6.
Tensor softmax(const Tensor& logits);

// Half-pixel-center sampling: src = (dst + 0.5) * (in/out) - 0.5, edge
// clamped. Identity when the dims already match.
Tensor bilinear_resize(const Tensor& input, int out_h, int out_w);

}  // namespace aegis
