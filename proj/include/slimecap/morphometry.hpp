#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slimecap/error.hpp"
#include "slimecap/image.hpp"

namespace slimecap {

struct MorphologyRecord {
    double time = 0.0;       // h
    double area = 0.0;       // cm^2
    double perimeter = 0.0;  // cm
    std::optional<double> circularity;
    std::optional<double> fractal_dim;
};

struct MorphologySeries {
    std::string sample_id;
    std::string group_label;
    std::vector<MorphologyRecord> records;  // strictly increasing time

    std::vector<double> times() const;
    std::vector<double> areas() const;
    std::vector<double> perimeters() const;
};

struct FractalFit {
    double d_f = 0.0;           // clamped to [1, 2]
    double raw_d_f = 0.0;       // regression slope magnitude before clamping
    double log_k = 0.0;
    double r_squared = 0.0;
    std::vector<int> box_sizes;
    std::vector<long> counts;
    bool clamped = false;
    bool degenerate = false;    // all counts equal; d_f is meaningless
};

struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// 4*pi*area/perimeter^2, or nullopt when the perimeter is zero.
std::optional<double> circularity(double area, double perimeter);

/// Circularity tolerance for discretized shapes: values in (1, 1.05] are
/// clamped to 1 with a warning, larger values become undefined.
inline constexpr double kCircularityTolerance = 1.05;
std::optional<double> clamp_circularity(std::optional<double> c, Warnings* warnings = nullptr);

/// Length (cm) of all outer and inner contours of the mask. Contours are the
/// iso-0.5 lines of the pixel-centre lattice (marching squares), traced into
/// closed loops and Gaussian-smoothed along arc to remove staircase bias.
/// Throws DataError for an empty mask.
double boundary_length(const BinaryMask& mask);

/// Foreground pixels with a 4-neighbour in the background or at the border.
std::vector<Pixel> boundary_pixels(const BinaryMask& mask);

/// Powers of two from 2 px up to min(width, height)/4 (at least {2,4,8,16}).
std::vector<int> default_box_sizes(int width, int height);

/// Box-counting dimension: N(r) counted on grids anchored at the origin, OLS
/// of log N against log r, d_f = -slope. Throws DataError if `boundary` is
/// empty or fewer than two box sizes are given.
FractalFit box_count_dimension(const std::vector<Pixel>& boundary, const std::vector<int>& box_sizes);

/// Area, perimeter, circularity and fractal dimension of one mask.
MorphologyRecord measure_mask(const BinaryMask& mask, double time_h, Warnings* warnings = nullptr);

struct DeltaSeries {
    std::vector<double> times;    // time of the later point of each pair
    std::vector<double> abs_dC;   // normalized by its maximum
    std::vector<double> abs_ddf;  // normalized by its maximum
    std::optional<double> pearson_r;
};

/// Successive absolute changes of circularity and fractal dimension, each
/// divided by its own maximum, with their Pearson correlation. Throws
/// DataError for fewer than 3 records or records lacking either index.
DeltaSeries delta_series(const MorphologySeries& series);

}  // namespace slimecap
