#include "aegis/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "aegis/labels.hpp"

namespace aegis {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'C', 'V', 'N'};
constexpr std::uint16_t kFormatVersion = 1;
// Upper bound per weight tensor; keeps fuzzed dims from driving allocations.
constexpr std::size_t kMaxWeightElems = std::size_t{1} << 24;

const char* kReservedOps[] = {"depthwise_conv2d", "separable_conv2d"};

std::string layer_tag(std::size_t idx, const char* op) {
    return "layer " + std::to_string(idx) + " (" + op + ")";
}

// ---- little-endian byte cursor ----

struct Cursor {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t off = 0;
    const std::string& origin;

    void need(std::size_t k, const char* what) const {
        if (off + k > n) {
            throw TruncationError(ErrorKind::Model,
                                  origin + ": truncated " + std::string(what), off);
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return p[off++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(p[off]) |
                          static_cast<std::uint16_t>(p[off + 1]) << 8;
        off += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[off + i]) << (8 * i);
        off += 4;
        return v;
    }
    std::string bytes(std::size_t k, const char* what) {
        need(k, what);
        std::string s(reinterpret_cast<const char*>(p + off), k);
        off += k;
        return s;
    }
    bool at_end() const { return off == n; }
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

}  // namespace

const char* layer_op_name(LayerOp op) {
    switch (op) {
        case LayerOp::Conv2d: return "conv2d";
        case LayerOp::BatchNorm: return "batchnorm";
        case LayerOp::Relu: return "relu";
        case LayerOp::Add: return "add";
        case LayerOp::GlobalAvgPool: return "global_avg_pool";
        case LayerOp::Dense: return "dense";
        case LayerOp::Softmax: return "softmax";
    }
    return "?";
}

const WeightEntry* WeightTable::find(const std::string& name) const {
    for (const auto& [n, e] : entries) {
        if (n == name) return &e;
    }
    return nullptr;
}

bool WeightTable::insert(std::string name, WeightEntry entry) {
    if (find(name)) return false;
    entries.emplace_back(std::move(name), std::move(entry));
    return true;
}

// ---- manifest JSON ----

namespace {

LayerOp parse_op_name(const std::string& name, std::size_t idx) {
    if (name == "conv2d") return LayerOp::Conv2d;
    if (name == "batchnorm") return LayerOp::BatchNorm;
    if (name == "relu") return LayerOp::Relu;
    if (name == "add") return LayerOp::Add;
    if (name == "global_avg_pool") return LayerOp::GlobalAvgPool;
    if (name == "dense") return LayerOp::Dense;
    if (name == "softmax") return LayerOp::Softmax;
    for (const char* r : kReservedOps) {
        if (name == r) {
            throw ValidationError("layer " + std::to_string(idx) + ": op '" + name +
                                  "' is reserved but not supported by this version");
        }
    }
    throw ValidationError("layer " + std::to_string(idx) + ": unknown op '" + name + "'");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

int get_int(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        throw ValidationError(where + ": missing or non-integer '" + std::string(key) + "'");
    }
    return obj[key].get<int>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ValidationError(where + ": missing or non-numeric '" + std::string(key) + "'");
    }
    return obj[key].get<double>();
}

}  // namespace

ModelManifest parse_manifest_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(ErrorKind::Model, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ValidationError("manifest root must be a JSON object");
    }
    reject_unknown_keys(root,
                        {"format_version", "input_spec", "class_labels", "normalization",
                         "layers"},
                        "manifest");

    ModelManifest m;
    m.format_version = get_int(root, "format_version", "manifest");

    if (!root.contains("input_spec") || !root["input_spec"].is_object()) {
        throw ValidationError("manifest: missing 'input_spec' object");
    }
    const json& ispec = root["input_spec"];
    reject_unknown_keys(ispec, {"height", "width", "channels"}, "input_spec");
    m.input_spec.height = get_int(ispec, "height", "input_spec");
    m.input_spec.width = get_int(ispec, "width", "input_spec");
    m.input_spec.channels = get_int(ispec, "channels", "input_spec");

    if (!root.contains("class_labels") || !root["class_labels"].is_array()) {
        throw ValidationError("manifest: missing 'class_labels' array");
    }
    for (const json& v : root["class_labels"]) {
        if (!v.is_string()) throw ValidationError("class_labels entries must be strings");
        m.class_labels.push_back(v.get<std::string>());
    }

    if (!root.contains("normalization") || !root["normalization"].is_object()) {
        throw ValidationError("manifest: missing 'normalization' object");
    }
    const json& norm = root["normalization"];
    reject_unknown_keys(norm, {"scale", "offset"}, "normalization");
    m.normalization.scale = static_cast<float>(get_number(norm, "scale", "normalization"));
    m.normalization.offset = static_cast<float>(get_number(norm, "offset", "normalization"));

    if (!root.contains("layers") || !root["layers"].is_array()) {
        throw ValidationError("manifest: missing 'layers' array");
    }
    std::size_t idx = 0;
    for (const json& jl : root["layers"]) {
        const std::string where = "layer " + std::to_string(idx);
        if (!jl.is_object()) throw ValidationError(where + ": must be an object");
        reject_unknown_keys(jl, {"op", "params", "weight_refs"}, where);
        if (!jl.contains("op") || !jl["op"].is_string()) {
            throw ValidationError(where + ": missing 'op'");
        }
        LayerDecl decl;
        decl.op = parse_op_name(jl["op"].get<std::string>(), idx);

        json params = jl.contains("params") ? jl["params"] : json::object();
        if (!params.is_object()) throw ValidationError(where + ": 'params' must be an object");
        switch (decl.op) {
            case LayerOp::Conv2d: {
                reject_unknown_keys(params, {"stride", "padding", "from"}, where);
                decl.stride = params.contains("stride") ? get_int(params, "stride", where) : 1;
                std::string pad = params.contains("padding")
                                      ? params["padding"].get<std::string>()
                                      : "same_zero";
                if (pad == "same_zero") {
                    decl.padding = Padding::SameZero;
                } else if (pad == "valid") {
                    decl.padding = Padding::Valid;
                } else {
                    throw ValidationError(where + ": unknown padding '" + pad + "'");
                }
                if (params.contains("from")) decl.from = get_int(params, "from", where);
                break;
            }
            case LayerOp::BatchNorm: {
                reject_unknown_keys(params, {"epsilon", "from"}, where);
                decl.epsilon = params.contains("epsilon")
                                   ? static_cast<float>(get_number(params, "epsilon", where))
                                   : 1e-5f;
                if (params.contains("from")) decl.from = get_int(params, "from", where);
                break;
            }
            case LayerOp::Add: {
                reject_unknown_keys(params, {"from"}, where);
                decl.add_from = get_int(params, "from", where);
                break;
            }
            default: {
                reject_unknown_keys(params, {"from"}, where);
                if (params.contains("from")) decl.from = get_int(params, "from", where);
                break;
            }
        }
        if (jl.contains("weight_refs")) {
            if (!jl["weight_refs"].is_array()) {
                throw ValidationError(where + ": 'weight_refs' must be an array");
            }
            for (const json& r : jl["weight_refs"]) {
                if (!r.is_string()) throw ValidationError(where + ": weight refs must be strings");
                decl.weight_refs.push_back(r.get<std::string>());
            }
        }
        m.layers.push_back(std::move(decl));
        ++idx;
    }
    return m;
}

std::string manifest_to_json(const ModelManifest& m) {
    json root;
    root["format_version"] = m.format_version;
    root["input_spec"] = {{"height", m.input_spec.height},
                          {"width", m.input_spec.width},
                          {"channels", m.input_spec.channels}};
    root["class_labels"] = m.class_labels;
    root["normalization"] = {{"scale", static_cast<double>(m.normalization.scale)},
                             {"offset", static_cast<double>(m.normalization.offset)}};
    json layers = json::array();
    for (const LayerDecl& l : m.layers) {
        json jl;
        jl["op"] = layer_op_name(l.op);
        json params = json::object();
        switch (l.op) {
            case LayerOp::Conv2d:
                params["stride"] = l.stride;
                params["padding"] = l.padding == Padding::SameZero ? "same_zero" : "valid";
                if (l.from >= 0) params["from"] = l.from;
                break;
            case LayerOp::BatchNorm:
                params["epsilon"] = static_cast<double>(l.epsilon);
                if (l.from >= 0) params["from"] = l.from;
                break;
            case LayerOp::Add:
                params["from"] = l.add_from;
                break;
            default:
                if (l.from >= 0) params["from"] = l.from;
                break;
        }
        if (!params.empty()) jl["params"] = params;
        if (!l.weight_refs.empty()) jl["weight_refs"] = l.weight_refs;
        layers.push_back(jl);
    }
    root["layers"] = layers;
    return root.dump();
}

// ---- shape inference ----

namespace {

const WeightEntry& resolve_weight(const WeightTable& weights, const LayerDecl& l,
                                  std::size_t ref_idx, std::size_t layer_idx) {
    const std::string where = layer_tag(layer_idx, layer_op_name(l.op));
    if (ref_idx >= l.weight_refs.size()) {
        throw ValidationError(where + ": expected " + std::to_string(ref_idx + 1) +
                              " weight refs, got " + std::to_string(l.weight_refs.size()));
    }
    const WeightEntry* e = weights.find(l.weight_refs[ref_idx]);
    if (!e) {
        throw ValidationError(where + ": weight '" + l.weight_refs[ref_idx] +
                              "' not found in weight table");
    }
    return *e;
}

void expect_refs(const LayerDecl& l, std::size_t count, std::size_t layer_idx) {
    if (l.weight_refs.size() != count) {
        throw ValidationError(layer_tag(layer_idx, layer_op_name(l.op)) + ": expected " +
                              std::to_string(count) + " weight refs, got " +
                              std::to_string(l.weight_refs.size()));
    }
}

}  // namespace

std::vector<std::vector<int>> infer_shapes(const ModelManifest& m, const WeightTable& weights) {
    if (m.input_spec.height < 1 || m.input_spec.width < 1 || m.input_spec.channels < 1) {
        throw ValidationError("input_spec dims must be >= 1");
    }
    if (m.layers.empty()) {
        throw ValidationError("manifest declares no layers");
    }
    std::vector<std::vector<int>> out;
    out.reserve(m.layers.size());
    const std::vector<int> input = {m.input_spec.height, m.input_spec.width,
                                    m.input_spec.channels};

    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const LayerDecl& l = m.layers[i];
        const std::string where = layer_tag(i, layer_op_name(l.op));

        if (l.from >= 0 && static_cast<std::size_t>(l.from) >= i) {
            throw ValidationError(where + ": 'from' must reference an earlier layer, got " +
                                  std::to_string(l.from));
        }
        const std::vector<int>& in =
            l.from >= 0 ? out[static_cast<std::size_t>(l.from)] : (i == 0 ? input : out[i - 1]);

        std::vector<int> shape;
        switch (l.op) {
            case LayerOp::Conv2d: {
                expect_refs(l, 2, i);
                const WeightEntry& kern = resolve_weight(weights, l, 0, i);
                const WeightEntry& bias = resolve_weight(weights, l, 1, i);
                if (in.size() != 3) {
                    throw ValidationError(where + ": input must be rank 3, got " +
                                          Tensor::shape_str(in));
                }
                if (kern.shape.size() != 4) {
                    throw ValidationError(where + ": kernel must be rank 4, got " +
                                          Tensor::shape_str(kern.shape));
                }
                const int kh = kern.shape[0], kw = kern.shape[1];
                if (kh % 2 == 0 || kw % 2 == 0) {
                    throw ValidationError(where + ": kernel dims must be odd, got " +
                                          Tensor::shape_str(kern.shape));
                }
                if (l.stride < 1) {
                    throw ValidationError(where + ": stride must be >= 1");
                }
                if (kern.shape[2] != in[2]) {
                    throw ValidationError(where + ": channel mismatch, input " +
                                          Tensor::shape_str(in) + " vs kernel " +
                                          Tensor::shape_str(kern.shape));
                }
                if (bias.shape.size() != 1 || bias.shape[0] != kern.shape[3]) {
                    throw ValidationError(where + ": bias " + Tensor::shape_str(bias.shape) +
                                          " does not match kernel " +
                                          Tensor::shape_str(kern.shape));
                }
                const bool same = l.padding == Padding::SameZero;
                const int oh = same ? (in[0] + l.stride - 1) / l.stride
                                    : (in[0] - kh) / l.stride + 1;
                const int ow = same ? (in[1] + l.stride - 1) / l.stride
                                    : (in[1] - kw) / l.stride + 1;
                if (oh < 1 || ow < 1) {
                    throw ValidationError(where + ": output dims collapse, input " +
                                          Tensor::shape_str(in) + " vs kernel " +
                                          Tensor::shape_str(kern.shape));
                }
                shape = {oh, ow, kern.shape[3]};
                break;
            }
            case LayerOp::BatchNorm: {
                expect_refs(l, 4, i);
                const int ch = in.back();
                for (std::size_t r = 0; r < 4; ++r) {
                    const WeightEntry& v = resolve_weight(weights, l, r, i);
                    if (v.shape.size() != 1 || v.shape[0] != ch) {
                        throw ValidationError(where + ": parameter '" + l.weight_refs[r] +
                                              "' shape " + Tensor::shape_str(v.shape) +
                                              " does not match channels " + std::to_string(ch));
                    }
                }
                shape = in;
                break;
            }
            case LayerOp::Relu: {
                expect_refs(l, 0, i);
                shape = in;
                break;
            }
            case LayerOp::Add: {
                expect_refs(l, 0, i);
                if (l.add_from < 0 || static_cast<std::size_t>(l.add_from) >= i) {
                    throw ValidationError(where +
                                          ": add 'from' must reference an earlier layer, got " +
                                          std::to_string(l.add_from));
                }
                const std::vector<int>& other = out[static_cast<std::size_t>(l.add_from)];
                if (other != in) {
                    throw ValidationError(where + ": shape mismatch, " + Tensor::shape_str(in) +
                                          " vs " + Tensor::shape_str(other) + " from layer " +
                                          std::to_string(l.add_from));
                }
                shape = in;
                break;
            }
            case LayerOp::GlobalAvgPool: {
                expect_refs(l, 0, i);
                if (in.size() != 3) {
                    throw ValidationError(where + ": input must be rank 3, got " +
                                          Tensor::shape_str(in));
                }
                shape = {1, 1, in[2]};
                break;
            }
            case LayerOp::Dense: {
                expect_refs(l, 2, i);
                const WeightEntry& w = resolve_weight(weights, l, 0, i);
                const WeightEntry& b = resolve_weight(weights, l, 1, i);
                if (in.size() != 3 || in[0] != 1 || in[1] != 1) {
                    throw ValidationError(where + ": input must be (1,1,C), got " +
                                          Tensor::shape_str(in));
                }
                if (w.shape.size() != 2 || w.shape[0] != in[2]) {
                    throw ValidationError(where + ": weights " + Tensor::shape_str(w.shape) +
                                          " do not match input " + Tensor::shape_str(in));
                }
                if (b.shape.size() != 1 || b.shape[0] != w.shape[1]) {
                    throw ValidationError(where + ": bias " + Tensor::shape_str(b.shape) +
                                          " does not match weights " +
                                          Tensor::shape_str(w.shape));
                }
                shape = {1, 1, w.shape[1]};
                break;
            }
            case LayerOp::Softmax: {
                expect_refs(l, 0, i);
                if (in.size() != 3 || in[0] != 1 || in[1] != 1) {
                    throw ValidationError(where + ": input must be (1,1,K), got " +
                                          Tensor::shape_str(in));
                }
                shape = in;
                break;
            }
        }
        out.push_back(std::move(shape));
    }
    return out;
}

// ---- validation ----

void validate_model(const Model& model) {
    const ModelManifest& m = model.manifest;
    if (m.format_version != kFormatVersion) {
        throw ValidationError("unsupported manifest format_version " +
                              std::to_string(m.format_version));
    }
    if (m.input_spec.height != 48 || m.input_spec.width != 48) {
        throw ValidationError("input_spec must be 48x48, got " +
                              std::to_string(m.input_spec.height) + "x" +
                              std::to_string(m.input_spec.width));
    }
    if (m.input_spec.channels < 1) {
        throw ValidationError("input_spec channels must be >= 1");
    }
    if (m.class_labels.size() != kClassLabels.size()) {
        throw ValidationError("expected 7 classes, got " +
                              std::to_string(m.class_labels.size()));
    }
    for (std::size_t i = 0; i < kClassLabels.size(); ++i) {
        if (m.class_labels[i] != kClassLabels[i]) {
            throw ValidationError("class_labels[" + std::to_string(i) + "] must be '" +
                                  std::string(kClassLabels[i]) + "', got '" +
                                  m.class_labels[i] + "'");
        }
    }
    if (m.normalization.scale == 0.0f) {
        throw ValidationError("normalization scale must be nonzero");
    }
    for (const LayerDecl& l : m.layers) {
        if (l.op == LayerOp::BatchNorm && !(l.epsilon > 0.0f)) {
            throw ValidationError("batchnorm epsilon must be > 0");
        }
    }

    const auto shapes = infer_shapes(m, model.weights);

    if (m.layers.back().op != LayerOp::Softmax) {
        throw ValidationError("last layer must be softmax, got " +
                              std::string(layer_op_name(m.layers.back().op)));
    }
    if (shapes.back().back() != kNumClasses) {
        throw ValidationError("expected 7 classes, got " + std::to_string(shapes.back().back()));
    }

    for (const auto& [name, entry] : model.weights.entries) {
        for (float v : entry.data) {
            if (!std::isfinite(v)) {
                throw ValidationError("weight '" + name + "' contains a non-finite value");
            }
        }
    }
}

// ---- container I/O ----

Model load_model_bytes(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    Cursor cur{bytes.data(), bytes.size(), 0, origin};

    const std::string magic = cur.bytes(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw FormatError(ErrorKind::Model, origin + ": bad magic, expected \"TCVN\"");
    }
    const std::uint16_t version = cur.u16("version");
    if (version != kFormatVersion) {
        throw FormatError(ErrorKind::Model,
                          origin + ": unsupported container version " + std::to_string(version));
    }
    const std::uint32_t manifest_len = cur.u32("manifest length");
    const std::string manifest_text = cur.bytes(manifest_len, "manifest");

    Model model;
    model.manifest = parse_manifest_json(manifest_text);

    while (!cur.at_end()) {
        const std::size_t record_off = cur.off;
        const std::uint16_t name_len = cur.u16("weight name length");
        if (name_len == 0) {
            throw FormatError(ErrorKind::Model, origin + ": empty weight name at offset " +
                                                    std::to_string(record_off));
        }
        const std::string name = cur.bytes(name_len, "weight name");
        const std::uint8_t rank = cur.u8("weight rank");
        if (rank < 1 || rank > 4) {
            throw FormatError(ErrorKind::Model, origin + ": weight '" + name +
                                                    "' has invalid rank " + std::to_string(rank));
        }
        WeightEntry entry;
        std::size_t count = 1;
        for (int d = 0; d < rank; ++d) {
            const std::uint32_t dim = cur.u32("weight dim");
            if (dim < 1 || dim > kMaxWeightElems) {
                throw FormatError(ErrorKind::Model, origin + ": weight '" + name +
                                                        "' has invalid dim " +
                                                        std::to_string(dim));
            }
            entry.shape.push_back(static_cast<int>(dim));
            count *= dim;
            if (count > kMaxWeightElems) {
                throw FormatError(ErrorKind::Model,
                                  origin + ": weight '" + name + "' is unreasonably large");
            }
        }
        cur.need(count * 4, "weight payload");
        entry.data.resize(count);
        // Floats are stored little-endian; this build targets LE hosts.
        static_assert(std::endian::native == std::endian::little,
                      "big-endian hosts need byte swapping here");
        std::memcpy(entry.data.data(), cur.p + cur.off, count * 4);
        cur.off += count * 4;

        if (!model.weights.insert(name, std::move(entry))) {
            throw ValidationError(origin + ": duplicate weight '" + name + "'");
        }
    }

    validate_model(model);
    return model;
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_model_bytes(bytes, path.filename().string());
}

std::vector<std::uint8_t> serialize_model(const Model& model) {
    validate_model(model);
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kFormatVersion);
    const std::string manifest = manifest_to_json(model.manifest);
    put_u32(out, static_cast<std::uint32_t>(manifest.size()));
    out.insert(out.end(), manifest.begin(), manifest.end());

    for (const auto& [name, entry] : model.weights.entries) {
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        out.push_back(static_cast<std::uint8_t>(entry.shape.size()));
        for (int d : entry.shape) put_u32(out, static_cast<std::uint32_t>(d));
        const std::size_t start = out.size();
        out.resize(start + entry.data.size() * 4);
        std::memcpy(out.data() + start, entry.data.data(), entry.data.size() * 4);
    }
    return out;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

// ---- reference ResNet20 recipe ----

namespace {

struct WeightSpec {
    std::string name;
    std::vector<int> shape;
    bool is_variance = false;
};

struct Resnet20Builder {
    ModelManifest manifest;
    std::vector<WeightSpec> specs;

    int last() const { return static_cast<int>(manifest.layers.size()) - 1; }

    void conv(const std::string& name, int k, int in_ch, int out_ch, int stride,
              int from = -1) {
        LayerDecl l;
        l.op = LayerOp::Conv2d;
        l.stride = stride;
        l.padding = Padding::SameZero;
        l.from = from;
        l.weight_refs = {name + ".kernel", name + ".bias"};
        manifest.layers.push_back(std::move(l));
        specs.push_back({name + ".kernel", {k, k, in_ch, out_ch}, false});
        specs.push_back({name + ".bias", {out_ch}, false});
    }

    void bn(const std::string& name, int ch) {
        LayerDecl l;
        l.op = LayerOp::BatchNorm;
        l.epsilon = 1e-5f;
        l.weight_refs = {name + ".gamma", name + ".beta", name + ".mean", name + ".var"};
        manifest.layers.push_back(std::move(l));
        specs.push_back({name + ".gamma", {ch}, false});
        specs.push_back({name + ".beta", {ch}, false});
        specs.push_back({name + ".mean", {ch}, false});
        specs.push_back({name + ".var", {ch}, true});
    }

    void simple(LayerOp op) {
        LayerDecl l;
        l.op = op;
        manifest.layers.push_back(std::move(l));
    }

    void add(int from) {
        LayerDecl l;
        l.op = LayerOp::Add;
        l.add_from = from;
        manifest.layers.push_back(std::move(l));
    }

    void dense(const std::string& name, int in_ch, int out_ch) {
        LayerDecl l;
        l.op = LayerOp::Dense;
        l.weight_refs = {name + ".weights", name + ".bias"};
        manifest.layers.push_back(std::move(l));
        specs.push_back({name + ".weights", {in_ch, out_ch}, false});
        specs.push_back({name + ".bias", {out_ch}, false});
    }
};

Resnet20Builder build_resnet20(int t) {
    if (t < 1 || t > 16) {
        throw ParameterError("window length t must be in 1..16, got " + std::to_string(t));
    }
    Resnet20Builder b;
    b.manifest.format_version = kFormatVersion;
    b.manifest.input_spec = {48, 48, t};
    for (auto label : kClassLabels) b.manifest.class_labels.emplace_back(label);
    b.manifest.normalization = {1.0f, 0.0f};

    // Spatiotemporal encoding stem: mixes the t time channels.
    b.conv("stem.conv", 3, t, 16, 1);
    b.bn("stem.bn", 16);
    b.simple(LayerOp::Relu);

    int in_ch = 16;
    for (int stage = 1; stage <= 3; ++stage) {
        const int width = 16 << (stage - 1);
        for (int block = 1; block <= 3; ++block) {
            const std::string prefix =
                "s" + std::to_string(stage) + ".b" + std::to_string(block) + ".";
            const bool entry = stage > 1 && block == 1;
            const int stride = entry ? 2 : 1;
            const int block_in = b.last();

            b.conv(prefix + "conv1", 3, in_ch, width, stride);
            b.bn(prefix + "bn1", width);
            b.simple(LayerOp::Relu);
            b.conv(prefix + "conv2", 3, width, width, 1);
            b.bn(prefix + "bn2", width);
            const int main_out = b.last();

            if (entry) {
                // 1x1 projection shortcut taken from the block input.
                b.conv(prefix + "proj", 1, in_ch, width, stride, block_in);
                b.bn(prefix + "projbn", width);
                b.add(main_out);
            } else {
                b.add(block_in);
            }
            b.simple(LayerOp::Relu);
            in_ch = width;
        }
    }

    b.simple(LayerOp::GlobalAvgPool);
    b.dense("head.dense", 64, kNumClasses);
    b.simple(LayerOp::Softmax);
    return b;
}

}  // namespace

ModelManifest reference_resnet20_manifest(int t) { return build_resnet20(t).manifest; }

Model gen_fixture_model(std::uint64_t seed, int t) {
    Resnet20Builder b = build_resnet20(t);
    std::sort(b.specs.begin(), b.specs.end(),
              [](const WeightSpec& a, const WeightSpec& c) { return a.name < c.name; });

    Model model;
    model.manifest = std::move(b.manifest);
    SplitMix64 rng(seed);
    for (const WeightSpec& spec : b.specs) {
        WeightEntry entry;
        entry.shape = spec.shape;
        std::size_t count = 1;
        for (int d : spec.shape) count *= static_cast<std::size_t>(d);
        entry.data.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            double v = -0.05 + 0.1 * rng.next_unit();
            if (spec.is_variance) v = std::fabs(v);  // running_var must be >= 0
            entry.data[i] = static_cast<float>(v);
        }
        model.weights.insert(spec.name, std::move(entry));
    }
    return model;
}

void gen_fixture(std::uint64_t seed, int t, const std::filesystem::path& path) {
    save_model(gen_fixture_model(seed, t), path);
}

}  // namespace aegis
