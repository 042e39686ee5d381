#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aegis/tensor.hpp"

namespace aegis {

// Layer ops understood by the executor. Depthwise/separable conv names are
// reserved in the wire format but rejected by this version.
enum class LayerOp { Conv2d, BatchNorm, Relu, Add, GlobalAvgPool, Dense, Softmax };

const char* layer_op_name(LayerOp op);

struct LayerDecl {
    LayerOp op = LayerOp::Relu;
    // Input layer index; -1 means "previous layer" (network input for layer 0).
    int from = -1;
    // add: index of the second input layer (required, earlier layer).
    int add_from = -1;
    // conv2d
    int stride = 1;
    Padding padding = Padding::SameZero;
    // batchnorm
    float epsilon = 1e-5f;
    // weight table names, op-specific order:
    //   conv2d: kernel, bias   batchnorm: gamma, beta, mean, var
    //   dense: weights, bias
    std::vector<std::string> weight_refs;
};

struct InputSpec {
    int height = 48;
    int width = 48;
    int channels = 3;  // the window length t
};

struct Normalization {
    float scale = 1.0f;
    float offset = 0.0f;
};

struct ModelManifest {
    int format_version = 1;
    InputSpec input_spec;
    std::vector<std::string> class_labels;
    Normalization normalization;
    std::vector<LayerDecl> layers;
};

struct WeightEntry {
    std::vector<int> shape;
    std::vector<float> data;
};

struct WeightTable {
    // Insertion-ordered on load; lookup by name.
    std::vector<std::pair<std::string, WeightEntry>> entries;

    const WeightEntry* find(const std::string& name) const;
    bool insert(std::string name, WeightEntry entry);  // false on duplicate
};

struct Model {
    ModelManifest manifest;
    WeightTable weights;
};

// ---- TCVN container ----
// magic "TCVN" | u16 version | u32 manifest length | manifest JSON |
// weight records: u16 name length | name | u8 rank | u32 dims... |
// float32 payload. All integers and floats little-endian.

Model load_model(const std::filesystem::path& path);
Model load_model_bytes(const std::vector<std::uint8_t>& bytes, const std::string& origin);

void save_model(const Model& model, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_model(const Model& model);

// Manifest-level checks shared by load and compile: canonical labels, known
// ops, resolvable weight refs, end-to-end shape chain, finite weights.
void validate_model(const Model& model);

ModelManifest parse_manifest_json(const std::string& json_text);
std::string manifest_to_json(const ModelManifest& manifest);

// Shape chain of a validated model: input spec followed by one output shape
// per layer. Throws ValidationError naming the first offending layer.
std::vector<std::vector<int>> infer_shapes(const ModelManifest& manifest,
                                           const WeightTable& weights);

// Canonical TimeConvNet graph: 3x3 stem conv (t -> 16, stride 1, same_zero),
// three stages of three basic blocks (widths 16/32/64, stride 2 + 1x1
// projection at stage entries, batchnorm+relu per conv), global average
// pool, dense 64 -> 7, softmax.
ModelManifest reference_resnet20_manifest(int t);

// Writes reference_resnet20_manifest(t) with splitmix64-seeded
// uniform(-0.05, 0.05) weights, drawn in lexicographic weight-name order.
// Identical seeds give bitwise identical files.
void gen_fixture(std::uint64_t seed, int t, const std::filesystem::path& path);
Model gen_fixture_model(std::uint64_t seed, int t);

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace aegis
