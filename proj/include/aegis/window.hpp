#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "aegis/image.hpp"
#include "aegis/tensor.hpp"

namespace aegis {

// One video frame entering the pipeline.
struct Frame {
    std::uint64_t index = 0;
    std::uint64_t timestamp_micros = 0;
    RgbImage pixels;
};

// Affine mapping applied to x/255, declared by the model manifest.
struct NormalizationSpec {
    float scale = 1.0f;
    float offset = 0.0f;
};

// ITU-R BT.601: round(0.299 R + 0.587 G + 0.114 B), clamped to [0,255].
GrayImage to_luma(const RgbImage& rgb);

// Box is intersected with the image bounds before extraction; an empty
// intersection is a crop error.
GrayImage crop_clamped(const GrayImage& img, const BoundingBox& box);

// FIFO of the last t preprocessed 48x48 face planes for one track, oldest
// first. Owned by exactly one FaceTrack and mutated from one thread.
class TimeWindow {
public:
    static constexpr int kSide = 48;

    explicit TimeWindow(int capacity);

    // Bilinear resize to 48x48, map to scale*(x/255)+offset, append; evicts
    // the oldest slot when full.
    void push(const GrayImage& face, const NormalizationSpec& n);

    // (48, 48, t), channel k = k-th oldest slot. With fewer than t pushes the
    // oldest available slot is replicated into the missing leading channels.
    Tensor stack() const;

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(slots_.size()); }
    const std::vector<float>& slot(int i) const { return slots_[static_cast<std::size_t>(i)]; }

private:
    int capacity_;
    std::deque<std::vector<float>> slots_;
};

}  // namespace aegis
