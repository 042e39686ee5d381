#include "aegis/graph.hpp"

#include <chrono>

#include "aegis/labels.hpp"
#include "aegis/ops.hpp"

namespace aegis {

namespace {

Tensor to_tensor(const WeightEntry& e) { return Tensor(e.shape, e.data); }

}  // namespace

CompiledGraph compile(const ModelManifest& manifest, const WeightTable& weights) {
    // Re-runs the shape chain so hand-built or tampered graphs fail here,
    // not mid-inference.
    const std::vector<std::vector<int>> shapes = infer_shapes(manifest, weights);

    CompiledGraph g;
    g.input_spec = manifest.input_spec;
    g.normalization = manifest.normalization;
    g.class_labels = manifest.class_labels;
    g.layers.reserve(manifest.layers.size());

    for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
        const LayerDecl& decl = manifest.layers[i];
        CompiledLayer layer;
        layer.op = decl.op;
        layer.from = decl.from;
        layer.add_from = decl.add_from;
        layer.out_shape = shapes[i];
        switch (decl.op) {
            case LayerOp::Conv2d:
                layer.conv.kernel = to_tensor(*weights.find(decl.weight_refs[0]));
                layer.conv.bias = to_tensor(*weights.find(decl.weight_refs[1]));
                layer.conv.stride = decl.stride;
                layer.conv.padding = decl.padding;
                break;
            case LayerOp::BatchNorm:
                layer.bn.gamma = to_tensor(*weights.find(decl.weight_refs[0]));
                layer.bn.beta = to_tensor(*weights.find(decl.weight_refs[1]));
                layer.bn.running_mean = to_tensor(*weights.find(decl.weight_refs[2]));
                layer.bn.running_var = to_tensor(*weights.find(decl.weight_refs[3]));
                layer.bn.epsilon = decl.epsilon;
                break;
            case LayerOp::Dense:
                layer.dense_weights = to_tensor(*weights.find(decl.weight_refs[0]));
                layer.dense_bias = to_tensor(*weights.find(decl.weight_refs[1]));
                break;
            default:
                break;
        }
        g.layers.push_back(std::move(layer));
    }

    if (g.layers.back().op == LayerOp::Softmax) {
        const int k = shapes.back().back();
        if (k != kNumClasses) {
            throw ValidationError("expected 7 classes, got " + std::to_string(k));
        }
        g.classifier = true;
    }
    return g;
}

InferenceResult infer(const CompiledGraph& g, const Tensor& window) {
    if (!g.classifier) {
        throw ShapeError("graph does not terminate in a 7-class softmax");
    }
    const std::vector<int> expect = {g.input_spec.height, g.input_spec.width,
                                     g.input_spec.channels};
    if (window.shape() != expect) {
        throw ShapeError("window shape " + window.shape_str() + " does not match input spec " +
                         Tensor::shape_str(expect));
    }

    using clock = std::chrono::steady_clock;
    InferenceResult result;
    result.per_layer_micros.reserve(g.layers.size());

    std::vector<Tensor> outputs;
    outputs.reserve(g.layers.size());

    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        const CompiledLayer& l = g.layers[i];
        const Tensor& in = l.from >= 0 ? outputs[static_cast<std::size_t>(l.from)]
                                       : (i == 0 ? window : outputs[i - 1]);
        const auto t0 = clock::now();
        Tensor out;
        switch (l.op) {
            case LayerOp::Conv2d: out = conv2d(in, l.conv); break;
            case LayerOp::BatchNorm: out = batchnorm_infer(in, l.bn); break;
            case LayerOp::Relu: out = relu(in); break;
            case LayerOp::Add:
                out = add(in, outputs[static_cast<std::size_t>(l.add_from)]);
                break;
            case LayerOp::GlobalAvgPool: out = global_avg_pool(in); break;
            case LayerOp::Dense: out = dense(in, l.dense_weights, l.dense_bias); break;
            case LayerOp::Softmax: out = softmax(in); break;
        }
        const auto t1 = clock::now();
        result.per_layer_micros.emplace_back(
            static_cast<int>(i),
            std::chrono::duration<double, std::micro>(t1 - t0).count());
        outputs.push_back(std::move(out));
    }

    const Tensor& probs = outputs.back();
    for (int k = 0; k < kNumClasses; ++k) {
        result.probabilities[static_cast<std::size_t>(k)] = probs.data()[k];
    }
    result.argmax_index = 0;
    for (int k = 1; k < kNumClasses; ++k) {
        if (result.probabilities[static_cast<std::size_t>(k)] >
            result.probabilities[static_cast<std::size_t>(result.argmax_index)]) {
            result.argmax_index = k;
        }
    }
    return result;
}

std::uint64_t flops_estimate(const CompiledGraph& g) {
    std::uint64_t macs = 0;
    for (const CompiledLayer& l : g.layers) {
        if (l.op == LayerOp::Conv2d) {
            const std::uint64_t oh = static_cast<std::uint64_t>(l.out_shape[0]);
            const std::uint64_t ow = static_cast<std::uint64_t>(l.out_shape[1]);
            const std::uint64_t kh = static_cast<std::uint64_t>(l.conv.kernel.dim(0));
            const std::uint64_t kw = static_cast<std::uint64_t>(l.conv.kernel.dim(1));
            const std::uint64_t ci = static_cast<std::uint64_t>(l.conv.kernel.dim(2));
            const std::uint64_t co = static_cast<std::uint64_t>(l.conv.kernel.dim(3));
            macs += oh * ow * kh * kw * ci * co;
        } else if (l.op == LayerOp::Dense) {
            macs += static_cast<std::uint64_t>(l.dense_weights.dim(0)) *
                    static_cast<std::uint64_t>(l.dense_weights.dim(1));
        }
    }
    return 2 * macs;
}

}  // namespace aegis
