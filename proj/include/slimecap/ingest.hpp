#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slimecap/error.hpp"
#include "slimecap/image.hpp"
#include "slimecap/morphometry.hpp"

namespace slimecap {

struct PlateImage {
    GrayImage pixels;
    double dpi = 1600.0;
    double center_x = 0.0;  // px
    double center_y = 0.0;  // px
    double radius = 0.0;    // px
    double timestamp = 0.0; // h since start

    /// Throws DataError on dpi <= 0, radius <= 0 or a plate circle that
    /// does not fit inside the raster.
    void validate() const;
};

struct SegmentationConfig {
    int inner_threshold = 100;      // applied for r <= radius_fraction * plate radius
    int outer_threshold = 140;      // applied in the outer annulus
    double radius_fraction = 0.85;
    double min_blob_area = 0.01;    // cm^2
    int median_filter_radius = 2;   // px, 0 disables
    bool organism_dark = true;      // organism darker than agar

    void validate() const;
};

/// Largest circle inscribed in the raster, for rigs without fixed geometry.
void detect_plate_circle(PlateImage& image);

/// Organism signal used for thresholding: inverted intensity when the organism
/// is dark, raw intensity otherwise. A pixel passes when signal > threshold.
int organism_signal(std::uint8_t intensity, bool organism_dark);

/// Median filter, two-zone threshold inside the plate circle, then removal of
/// 8-connected components smaller than min_blob_area.
BinaryMask segment_plate(const PlateImage& image, const SegmentationConfig& cfg,
                         Warnings* warnings = nullptr);

struct TimedMask {
    double time = 0.0;  // h
    BinaryMask mask;
};

/// Morphology of a time-ordered mask sequence. All masks must share scale.
MorphologySeries mask_series_to_morphology(const std::vector<TimedMask>& masks,
                                           const std::string& sample_id = {},
                                           Warnings* warnings = nullptr);

/// Header: sample_id,time_h,area_cm2,perimeter_cm[,circularity][,fractal_dim][,group]
/// Missing circularity is recomputed from area and perimeter. One series per
/// sample, in order of first appearance.
std::vector<MorphologySeries> load_morphology_csv(const std::filesystem::path& path,
                                                  Warnings* warnings = nullptr);
std::vector<MorphologySeries> parse_morphology_csv(const std::string& text,
                                                   Warnings* warnings = nullptr);

GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Parses "<sample_id>_t<minutes>.png"; nullopt if the name does not match.
struct ImageName {
    std::string sample_id;
    int minutes = 0;
};
std::optional<ImageName> parse_image_name(const std::string& filename);

/// key = value lines, '#' comments. Keys are lower-cased and trimmed.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Applies and erases the keys SegmentationConfig understands; other keys are
/// left for the caller. Malformed values raise UsageError.
void apply_segmentation_keys(SegmentationConfig& cfg, std::map<std::string, std::string>& kv);

}  // namespace slimecap
