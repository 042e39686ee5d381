#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aegis/model.hpp"
#include "aegis/tensor.hpp"

namespace aegis {

struct CompiledLayer {
    LayerOp op = LayerOp::Relu;
    int from = -1;      // -1: previous layer (network input for layer 0)
    int add_from = -1;  // add only
    ConvParams conv;
    BatchNormParams bn;
    Tensor dense_weights;
    Tensor dense_bias;
    std::vector<int> out_shape;
};

// Immutable execution plan; safe to share across threads. infer() keeps all
// per-call state on its own stack, so concurrent calls on one graph are fine.
struct CompiledGraph {
    InputSpec input_spec;
    Normalization normalization;
    std::vector<std::string> class_labels;
    std::vector<CompiledLayer> layers;
    // True when the graph terminates in a 7-class softmax; required by infer.
    bool classifier = false;
};

struct InferenceResult {
    std::array<float, 7> probabilities{};
    int argmax_index = 0;  // smallest index attaining the max
    std::vector<std::pair<int, double>> per_layer_micros;
};

// Resolves weights and precomputes the shape chain. Shape breaks are compile
// errors naming the layer and both shapes. A graph whose final layer is a
// softmax must end with 7 classes.
CompiledGraph compile(const ModelManifest& manifest, const WeightTable& weights);

inline CompiledGraph compile(const Model& model) {
    return compile(model.manifest, model.weights);
}

// Executes the plan on a stacked, already-normalized window. Deterministic:
// identical (graph, window) give bitwise identical probabilities.
InferenceResult infer(const CompiledGraph& g, const Tensor& window);

// 2 * multiply-accumulate count over all conv/dense layers.
std::uint64_t flops_estimate(const CompiledGraph& g);

}  // namespace aegis
