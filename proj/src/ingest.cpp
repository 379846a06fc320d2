#include "slimecap/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "slimecap/units.hpp"

namespace slimecap {

void PlateImage::validate() const {
    if (!(dpi > 0)) throw DataError("plate image: dpi must be positive");
    if (!(radius > 0)) throw DataError("plate image: degenerate plate radius");
    if (pixels.width <= 0 || pixels.height <= 0 ||
        pixels.pixels.size() != static_cast<std::size_t>(pixels.width) * pixels.height)
        throw DataError("plate image: empty or inconsistent raster");
    const double slack = 0.5;
    if (center_x - radius < -slack || center_y - radius < -slack || center_x + radius > pixels.width - 1 + slack ||
        center_y + radius > pixels.height - 1 + slack)
        throw DataError("plate image: plate circle extends beyond the raster");
}

void SegmentationConfig::validate() const {
    if (inner_threshold < 0 || inner_threshold > 255 || outer_threshold < 0 || outer_threshold > 255)
        throw UsageError("segmentation: thresholds must lie in [0, 255]");
    if (outer_threshold < inner_threshold) throw UsageError("segmentation: outer_threshold < inner_threshold");
    if (!(radius_fraction > 0) || !(radius_fraction < 1))
        throw UsageError("segmentation: radius_fraction must lie in (0, 1)");
    if (min_blob_area < 0) throw UsageError("segmentation: min_blob_area must be non-negative");
    if (median_filter_radius < 0) throw UsageError("segmentation: median_filter_radius must be non-negative");
}

void detect_plate_circle(PlateImage& image) {
    image.center_x = (image.pixels.width - 1) / 2.0;
    image.center_y = (image.pixels.height - 1) / 2.0;
    image.radius = std::min(image.pixels.width, image.pixels.height) / 2.0 - 1.0;
}

int organism_signal(std::uint8_t intensity, bool organism_dark) {
    return organism_dark ? 255 - intensity : intensity;
}

BinaryMask segment_plate(const PlateImage& image, const SegmentationConfig& cfg, Warnings* warnings) {
    image.validate();
    cfg.validate();
    const int w = image.pixels.width, h = image.pixels.height;
    cv::Mat src(h, w, CV_8UC1, const_cast<std::uint8_t*>(image.pixels.pixels.data()));
    cv::Mat filtered;
    if (cfg.median_filter_radius > 0)
        cv::medianBlur(src, filtered, 2 * cfg.median_filter_radius + 1);
    else
        filtered = src;

    const double r_inner = cfg.radius_fraction * image.radius;
    cv::Mat bin(h, w, CV_8UC1, cv::Scalar(0));
    for (int y = 0; y < h; ++y) {
        const auto* row = filtered.ptr<std::uint8_t>(y);
        auto* out = bin.ptr<std::uint8_t>(y);
        for (int x = 0; x < w; ++x) {
            const double r = std::hypot(x - image.center_x, y - image.center_y);
            if (r > image.radius) continue;
            const int thr = r <= r_inner ? cfg.inner_threshold : cfg.outer_threshold;
            out[x] = organism_signal(row[x], cfg.organism_dark) > thr ? 1 : 0;
        }
    }

    const double scale = units::cm_per_pixel(image.dpi);
    BinaryMask mask(w, h, scale);
    cv::Mat labels, stats, centroids;
    const int n = cv::connectedComponentsWithStats(bin, labels, stats, centroids, 8, CV_32S);
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i)
        keep[static_cast<std::size_t>(i)] = stats.at<int>(i, cv::CC_STAT_AREA) * scale * scale >= cfg.min_blob_area;
    for (int y = 0; y < h; ++y) {
        const int* lab = labels.ptr<int>(y);
        for (int x = 0; x < w; ++x)
            if (lab[x] > 0 && keep[static_cast<std::size_t>(lab[x])]) mask.set(x, y);
    }
    if (mask.empty()) warn(warnings, "segmentation produced an empty mask");
    return mask;
}

MorphologySeries mask_series_to_morphology(const std::vector<TimedMask>& masks, const std::string& sample_id,
                                           Warnings* warnings) {
    MorphologySeries s;
    s.sample_id = sample_id;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        if (i > 0 && std::abs(masks[i].mask.scale - masks[0].mask.scale) > 1e-12 * masks[0].mask.scale)
            throw DataError("mask_series_to_morphology: masks differ in scale");
        s.records.push_back(measure_mask(masks[i].mask, masks[i].time, warnings));
    }
    return s;
}

// CSV --------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError("invalid number '" + s + "' for " + what);
    }
    if (pos != s.size() || !std::isfinite(v)) throw DataError("invalid number '" + s + "' for " + what);
    return v;
}

}  // namespace

std::vector<MorphologySeries> parse_morphology_csv(const std::string& text, Warnings* warnings) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (!trim(line).empty()) {
            header = split_csv_line(trim(line));
            break;
        }
    }
    if (header.empty()) throw DataError("morphology CSV: missing header");
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* req : {"sample_id", "time_h", "area_cm2", "perimeter_cm"})
        if (!col.count(req)) throw DataError(std::string("morphology CSV: missing column '") + req + "'");
    auto opt_col = [&](const char* name) -> std::optional<std::size_t> {
        auto it = col.find(name);
        return it == col.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    };
    const auto c_circ = opt_col("circularity"), c_df = opt_col("fractal_dim"), c_group = opt_col("group");

    std::vector<MorphologySeries> out;
    std::unordered_map<std::string, std::size_t> index;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(trim(line));
        if (cells.size() != header.size())
            throw DataError("morphology CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
        const std::string where = "line " + std::to_string(line_no);
        const std::string id = cells[col["sample_id"]];
        if (id.empty()) throw DataError("morphology CSV " + where + ": empty sample_id");
        MorphologyRecord r;
        r.time = parse_number(cells[col["time_h"]], "time_h, " + where);
        r.area = parse_number(cells[col["area_cm2"]], "area_cm2, " + where);
        r.perimeter = parse_number(cells[col["perimeter_cm"]], "perimeter_cm, " + where);
        if (r.area < 0 || r.perimeter < 0) throw DataError("morphology CSV " + where + ": negative area or perimeter");
        if (c_circ && !cells[*c_circ].empty())
            r.circularity = parse_number(cells[*c_circ], "circularity, " + where);
        else
            r.circularity = clamp_circularity(circularity(r.area, r.perimeter), warnings);
        if (c_df && !cells[*c_df].empty()) r.fractal_dim = parse_number(cells[*c_df], "fractal_dim, " + where);

        auto it = index.find(id);
        if (it == index.end()) {
            it = index.emplace(id, out.size()).first;
            out.emplace_back();
            out.back().sample_id = id;
        }
        auto& s = out[it->second];
        if (c_group && !cells[*c_group].empty()) {
            if (!s.group_label.empty() && s.group_label != cells[*c_group])
                throw DataError("morphology CSV " + where + ": sample '" + id + "' changes group");
            s.group_label = cells[*c_group];
        }
        if (!s.records.empty() && r.time <= s.records.back().time)
            throw DataError("morphology CSV " + where + ": time not increasing for sample '" + id + "'");
        s.records.push_back(r);
    }
    if (out.empty()) throw DataError("morphology CSV: no data rows");
    return out;
}

std::vector<MorphologySeries> load_morphology_csv(const std::filesystem::path& path, Warnings* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_morphology_csv(ss.str(), warnings);
}

// Images -----------------------------------------------------------------------

GrayImage read_png(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw DataError("cannot read image " + path.string());
    GrayImage img(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) std::copy_n(m.ptr<std::uint8_t>(y), m.cols, &img.at(0, y));
    return img;
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
    cv::Mat m(image.height, image.width, CV_8UC1, const_cast<std::uint8_t*>(image.pixels.data()));
    if (!cv::imwrite(path.string(), m)) throw DataError("cannot write image " + path.string());
}

std::optional<ImageName> parse_image_name(const std::string& filename) {
    static const std::regex re(R"(^(.+)_t(\d+)\.png$)", std::regex::icase);
    std::smatch m;
    if (!std::regex_match(filename, m, re)) return std::nullopt;
    return ImageName{m[1].str(), std::stoi(m[2].str())};
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(n) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

namespace {

int to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int out = 0;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw UsageError("config: '" + key + "' expects an integer");
    }
    if (pos != v.size()) throw UsageError("config: '" + key + "' expects an integer");
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return parse_number(v, key);
    } catch (const DataError&) {
        throw UsageError("config: '" + key + "' expects a number");
    }
}

bool to_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config: '" + key + "' expects true or false");
}

}  // namespace

void apply_segmentation_keys(SegmentationConfig& cfg, std::map<std::string, std::string>& kv) {
    auto take = [&](const char* key, auto&& apply) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        apply(it->first, it->second);
        kv.erase(it);
    };
    take("inner_threshold", [&](auto& k, auto& v) { cfg.inner_threshold = to_int(k, v); });
    take("outer_threshold", [&](auto& k, auto& v) { cfg.outer_threshold = to_int(k, v); });
    take("radius_fraction", [&](auto& k, auto& v) { cfg.radius_fraction = to_double(k, v); });
    take("min_blob_area", [&](auto& k, auto& v) { cfg.min_blob_area = to_double(k, v); });
    take("median_filter_radius", [&](auto& k, auto& v) { cfg.median_filter_radius = to_int(k, v); });
    take("organism_dark", [&](auto& k, auto& v) { cfg.organism_dark = to_bool(k, v); });
}

}  // namespace slimecap
