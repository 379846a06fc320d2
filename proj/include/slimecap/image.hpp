#pragma once

#include <cstdint>
#include <vector>

namespace slimecap {

/// Row-major 8-bit grayscale raster.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Organism footprint with its physical pixel pitch.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1
    double scale = 1.0;              // cm per pixel

    BinaryMask() = default;
    BinaryMask(int w, int h, double cm_per_px)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0), scale(cm_per_px) {}

    bool get(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height &&
               bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    /// Physical area in cm^2.
    double area() const { return static_cast<double>(count()) * scale * scale; }
};

inline std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
}

}  // namespace slimecap
