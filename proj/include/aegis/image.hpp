#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "aegis/error.hpp"

namespace aegis {

// Row-major 8-bit luma plane.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// Row-major interleaved RGB, 3 bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 3

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    const std::uint8_t* px(int x, int y) const {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    std::uint8_t* px(int x, int y) {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }

    bool operator==(const RgbImage& o) const = default;
};

// Row-major interleaved RGBA, 4 bytes per pixel.
struct RgbaImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 4

    RgbaImage() = default;
    RgbaImage(int w, int h)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 4, 0) {}

    const std::uint8_t* px(int x, int y) const {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 4];
    }
    std::uint8_t* px(int x, int y) {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 4];
    }
};

// Top-left anchored pixel rectangle.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const BoundingBox& o) const = default;
};

}  // namespace aegis
