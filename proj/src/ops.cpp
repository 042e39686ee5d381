#include "aegis/ops.hpp"

#include <cmath>
#include <vector>

namespace aegis {

namespace {

void require_rank3(const Tensor& t, const char* op) {
    if (t.rank() != 3) {
        throw ShapeError(std::string(op) + " expects a rank-3 (H,W,C) tensor, got " +
                         t.shape_str());
    }
}

void validate_conv_params(const Tensor& input, const ConvParams& p) {
    require_rank3(input, "conv2d");
    if (p.kernel.rank() != 4) {
        throw ShapeError("conv2d kernel must be rank-4 (kh,kw,in,out), got " +
                         p.kernel.shape_str());
    }
    const int kh = p.kernel.dim(0), kw = p.kernel.dim(1);
    if (kh % 2 == 0 || kw % 2 == 0) {
        throw ParameterError("conv2d kernel dims must be odd, got " + p.kernel.shape_str());
    }
    if (p.stride < 1) {
        throw ParameterError("conv2d stride must be >= 1, got " + std::to_string(p.stride));
    }
    if (input.channels() != p.kernel.dim(2)) {
        throw ShapeError("conv2d channel mismatch: input " + input.shape_str() +
                         " vs kernel " + p.kernel.shape_str());
    }
    if (p.bias.rank() != 1 || p.bias.dim(0) != p.kernel.dim(3)) {
        throw ShapeError("conv2d bias shape " + p.bias.shape_str() +
                         " does not match kernel " + p.kernel.shape_str());
    }
}

}  // namespace

Tensor conv2d(const Tensor& input, const ConvParams& p) {
    validate_conv_params(input, p);

    const int h = input.dim(0), w = input.dim(1), in_ch = input.dim(2);
    const int kh = p.kernel.dim(0), kw = p.kernel.dim(1), out_ch = p.kernel.dim(3);
    const int stride = p.stride;
    const bool same = p.padding == Padding::SameZero;
    const int pad_h = same ? (kh - 1) / 2 : 0;
    const int pad_w = same ? (kw - 1) / 2 : 0;

    const int out_h = same ? (h + stride - 1) / stride : (h - kh) / stride + 1;
    const int out_w = same ? (w + stride - 1) / stride : (w - kw) / stride + 1;
    if (out_h < 1 || out_w < 1) {
        throw ShapeError("conv2d valid padding leaves no output: input " +
                         input.shape_str() + " vs kernel " + p.kernel.shape_str());
    }

    Tensor out({out_h, out_w, out_ch});
    const float* in_data = input.data();
    const float* k_data = p.kernel.data();
    const float* b_data = p.bias.data();
    float* out_data = out.data();

    // One accumulator per output channel; each output element's reduction
    // runs kh -> kw -> c regardless of how the k loop vectorizes.
    std::vector<double> acc(static_cast<std::size_t>(out_ch));

    for (int oy = 0; oy < out_h; ++oy) {
        const int iy0 = oy * stride - pad_h;
        for (int ox = 0; ox < out_w; ++ox) {
            const int ix0 = ox * stride - pad_w;
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int r = 0; r < kh; ++r) {
                const int iy = iy0 + r;
                if (iy < 0 || iy >= h) continue;  // zero padding contributes nothing
                for (int s = 0; s < kw; ++s) {
                    const int ix = ix0 + s;
                    if (ix < 0 || ix >= w) continue;
                    const float* xin = in_data + (static_cast<std::size_t>(iy) * w + ix) * in_ch;
                    const float* krs =
                        k_data + (static_cast<std::size_t>(r) * kw + s) * in_ch * out_ch;
                    for (int c = 0; c < in_ch; ++c) {
                        const double xv = static_cast<double>(xin[c]);
                        const float* kc = krs + static_cast<std::size_t>(c) * out_ch;
                        double* ap = acc.data();
                        for (int k = 0; k < out_ch; ++k) {
                            ap[k] += xv * static_cast<double>(kc[k]);
                        }
                    }
                }
            }
            float* op = out_data + (static_cast<std::size_t>(oy) * out_w + ox) * out_ch;
            for (int k = 0; k < out_ch; ++k) {
                op[k] = static_cast<float>(acc[k] + static_cast<double>(b_data[k]));
            }
        }
    }
    return out;
}

Tensor batchnorm_infer(const Tensor& input, const BatchNormParams& p) {
    const int ch = input.channels();
    if (p.gamma.rank() != 1 || p.gamma.dim(0) != ch) {
        throw ShapeError("batchnorm channel mismatch: input " + input.shape_str() +
                         " vs gamma " + p.gamma.shape_str());
    }
    if (!p.beta.same_shape(p.gamma) || !p.running_mean.same_shape(p.gamma) ||
        !p.running_var.same_shape(p.gamma)) {
        throw ShapeError("batchnorm parameter vectors must share one shape");
    }
    if (p.epsilon < 0.0f) {
        throw ParameterError("batchnorm epsilon must be >= 0");
    }

    // Precompute per-channel scale/shift in double.
    std::vector<double> scale(static_cast<std::size_t>(ch)), shift(static_cast<std::size_t>(ch));
    for (int c = 0; c < ch; ++c) {
        const double var = static_cast<double>(p.running_var.data()[c]);
        const double denom = var + static_cast<double>(p.epsilon);
        if (denom <= 0.0) {
            throw ParameterError("batchnorm variance + epsilon must be > 0 at channel " +
                                 std::to_string(c));
        }
        const double inv = 1.0 / std::sqrt(denom);
        scale[static_cast<std::size_t>(c)] = static_cast<double>(p.gamma.data()[c]) * inv;
        shift[static_cast<std::size_t>(c)] = static_cast<double>(p.beta.data()[c]);
    }
    std::vector<double> mean(static_cast<std::size_t>(ch));
    for (int c = 0; c < ch; ++c) mean[static_cast<std::size_t>(c)] = p.running_mean.data()[c];

    Tensor out(input.shape());
    const float* x = input.data();
    float* y = out.data();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % static_cast<std::size_t>(ch);
        y[i] = static_cast<float>((static_cast<double>(x[i]) - mean[c]) * scale[c] + shift[c]);
    }
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out(input.shape());
    const float* x = input.data();
    float* y = out.data();
    for (std::size_t i = 0; i < input.size(); ++i) {
        y[i] = x[i] > 0.0f ? x[i] : 0.0f;
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("add shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out(a.shape());
    const float* pa = a.data();
    const float* pb = b.data();
    float* y = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        y[i] = pa[i] + pb[i];
    }
    return out;
}

Tensor global_avg_pool(const Tensor& input) {
    require_rank3(input, "global_avg_pool");
    const int h = input.dim(0), w = input.dim(1), ch = input.dim(2);
    std::vector<double> acc(static_cast<std::size_t>(ch), 0.0);
    const float* x = input.data();
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (std::size_t i = 0; i < plane; ++i) {
        const float* px = x + i * ch;
        for (int c = 0; c < ch; ++c) {
            acc[static_cast<std::size_t>(c)] += static_cast<double>(px[c]);
        }
    }
    Tensor out({1, 1, ch});
    const double inv = 1.0 / static_cast<double>(plane);
    for (int c = 0; c < ch; ++c) {
        out.data()[c] = static_cast<float>(acc[static_cast<std::size_t>(c)] * inv);
    }
    return out;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (input.rank() != 3 || input.dim(0) != 1 || input.dim(1) != 1) {
        throw ShapeError("dense expects a (1,1,C) input, got " + input.shape_str());
    }
    if (weights.rank() != 2 || weights.dim(0) != input.dim(2)) {
        throw ShapeError("dense weight mismatch: input " + input.shape_str() +
                         " vs weights " + weights.shape_str());
    }
    const int c_in = weights.dim(0), k_out = weights.dim(1);
    if (bias.rank() != 1 || bias.dim(0) != k_out) {
        throw ShapeError("dense bias shape " + bias.shape_str() + " does not match weights " +
                         weights.shape_str());
    }
    Tensor out({1, 1, k_out});
    const float* x = input.data();
    const float* wd = weights.data();
    for (int k = 0; k < k_out; ++k) {
        double acc = 0.0;
        for (int c = 0; c < c_in; ++c) {
            acc += static_cast<double>(x[c]) *
                   static_cast<double>(wd[static_cast<std::size_t>(c) * k_out + k]);
        }
        out.data()[k] = static_cast<float>(acc + static_cast<double>(bias.data()[k]));
    }
    return out;
}

Tensor softmax(const Tensor& logits) {
    if (logits.rank() != 3 || logits.dim(0) != 1 || logits.dim(1) != 1) {
        throw ShapeError("softmax expects a (1,1,K) tensor, got " + logits.shape_str());
    }
    const int k_out = logits.dim(2);
    const float* z = logits.data();
    float max_z = z[0];
    for (int k = 0; k < k_out; ++k) {
        if (!std::isfinite(z[k])) {
            throw NumericError("softmax logit " + std::to_string(k) + " is not finite");
        }
        if (z[k] > max_z) max_z = z[k];
    }
    std::vector<double> e(static_cast<std::size_t>(k_out));
    double sum = 0.0;
    for (int k = 0; k < k_out; ++k) {
        e[static_cast<std::size_t>(k)] =
            std::exp(static_cast<double>(z[k]) - static_cast<double>(max_z));
        sum += e[static_cast<std::size_t>(k)];
    }
    Tensor out({1, 1, k_out});
    for (int k = 0; k < k_out; ++k) {
        out.data()[k] = static_cast<float>(e[static_cast<std::size_t>(k)] / sum);
    }
    return out;
}

Tensor bilinear_resize(const Tensor& input, int out_h, int out_w) {
    require_rank3(input, "bilinear_resize");
    if (out_h < 1 || out_w < 1) {
        throw ParameterError("bilinear_resize output dims must be >= 1");
    }
    const int h = input.dim(0), w = input.dim(1), ch = input.dim(2);
    const double sy = static_cast<double>(h) / out_h;
    const double sx = static_cast<double>(w) / out_w;

    Tensor out({out_h, out_w, ch});
    for (int oy = 0; oy < out_h; ++oy) {
        const double fy_src = (oy + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy_src));
        double fy = fy_src - y0;
        int y1 = y0 + 1;
        y0 = std::clamp(y0, 0, h - 1);
        y1 = std::clamp(y1, 0, h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            const double fx_src = (ox + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx_src));
            double fx = fx_src - x0;
            int x1 = x0 + 1;
            x0 = std::clamp(x0, 0, w - 1);
            x1 = std::clamp(x1, 0, w - 1);
            for (int c = 0; c < ch; ++c) {
                const double p00 = input.at(y0, x0, c);
                const double p01 = input.at(y0, x1, c);
                const double p10 = input.at(y1, x0, c);
                const double p11 = input.at(y1, x1, c);
                const double top = p00 + (p01 - p00) * fx;
                const double bot = p10 + (p11 - p10) * fx;
                out.at(oy, ox, c) = static_cast<float>(top + (bot - top) * fy);
            }
        }
    }
    return out;
}

}  // namespace aegis
