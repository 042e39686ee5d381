#include "aegis/window.hpp"

#include <cmath>

#include "aegis/ops.hpp"

namespace aegis {

GrayImage to_luma(const RgbImage& rgb) {
    GrayImage out(rgb.width, rgb.height);
    const std::uint8_t* src = rgb.pixels.data();
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const double y = 0.299 * src[i * 3] + 0.587 * src[i * 3 + 1] + 0.114 * src[i * 3 + 2];
        const long r = std::lround(y);
        out.pixels[i] = static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
    }
    return out;
}

GrayImage crop_clamped(const GrayImage& img, const BoundingBox& box) {
    if (box.w < 1 || box.h < 1) {
        throw CropError("crop box must have positive dims, got " + std::to_string(box.w) + "x" +
                        std::to_string(box.h));
    }
    const int x0 = std::max(box.x, 0);
    const int y0 = std::max(box.y, 0);
    const int x1 = std::min(box.x + box.w, img.width);
    const int y1 = std::min(box.y + box.h, img.height);
    if (x0 >= x1 || y0 >= y1) {
        throw CropError("crop box lies entirely outside the image");
    }
    GrayImage out(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            out.at(x - x0, y - y0) = img.at(x, y);
        }
    }
    return out;
}

TimeWindow::TimeWindow(int capacity) : capacity_(capacity) {
    if (capacity < 1) {
        throw ParameterError("time window capacity must be >= 1, got " +
                             std::to_string(capacity));
    }
}

void TimeWindow::push(const GrayImage& face, const NormalizationSpec& n) {
    // u8 -> float tensor in [0,255], resize, then the affine map on x/255.
    Tensor plane({face.height, face.width, 1});
    for (std::size_t i = 0; i < face.pixels.size(); ++i) {
        plane.data()[i] = static_cast<float>(face.pixels[i]);
    }
    const Tensor resized = bilinear_resize(plane, kSide, kSide);

    std::vector<float> slot(static_cast<std::size_t>(kSide) * kSide);
    const double scale = static_cast<double>(n.scale);
    const double offset = static_cast<double>(n.offset);
    for (std::size_t i = 0; i < slot.size(); ++i) {
        slot[i] = static_cast<float>(
            scale * (static_cast<double>(resized.data()[i]) / 255.0) + offset);
    }
    slots_.push_back(std::move(slot));
    if (static_cast<int>(slots_.size()) > capacity_) {
        slots_.pop_front();
    }
}

Tensor TimeWindow::stack() const {
    if (slots_.empty()) {
        throw NotReadyError("time window is empty; push at least one frame before stacking");
    }
    const int t = capacity_;
    const int have = static_cast<int>(slots_.size());
    Tensor out({kSide, kSide, t});
    float* dst = out.data();
    for (int k = 0; k < t; ++k) {
        // Missing leading channels replicate the oldest available slot.
        const int src_idx = std::max(0, k - (t - have));
        const std::vector<float>& src = slots_[static_cast<std::size_t>(src_idx)];
        for (int i = 0; i < kSide * kSide; ++i) {
            dst[static_cast<std::size_t>(i) * t + k] = src[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

}  // namespace aegis
