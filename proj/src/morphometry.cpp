#include "slimecap/morphometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "slimecap/stats.hpp"

namespace slimecap {

std::vector<double> MorphologySeries::times() const {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.time);
    return v;
}

std::vector<double> MorphologySeries::areas() const {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.area);
    return v;
}

std::vector<double> MorphologySeries::perimeters() const {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.perimeter);
    return v;
}

std::optional<double> circularity(double area, double perimeter) {
    if (!(perimeter > 0)) return std::nullopt;
    return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

std::optional<double> clamp_circularity(std::optional<double> c, Warnings* warnings) {
    if (!c) return c;
    if (*c <= 1.0) return c;
    if (*c <= kCircularityTolerance) {
        warn(warnings, "circularity " + std::to_string(*c) + " clamped to 1");
        return 1.0;
    }
    warn(warnings, "circularity " + std::to_string(*c) + " exceeds the discretization tolerance");
    return std::nullopt;
}

// Contour tracing --------------------------------------------------------------
//
// Contour points sit on lattice edges between pixel centres. Horizontal edge
// (x,y)-(x+1,y) and vertical edge (x,y)-(x,y+1) get distinct integer keys; the
// lattice is padded by one pixel so every contour closes.

namespace {

class ContourGraph {
public:
    explicit ContourGraph(int w) : w_(w + 2) {}

    std::int64_t hkey(int x, int y) const { return 2 * (static_cast<std::int64_t>(y + 1) * w_ + (x + 1)); }
    std::int64_t vkey(int x, int y) const { return hkey(x, y) + 1; }

    void link(std::int64_t a, std::int64_t b) {
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }

    static std::array<double, 2> coords(std::int64_t key, int w_padded) {
        const std::int64_t cell = key / 2;
        const double x = static_cast<double>(cell % w_padded) - 1.0;
        const double y = static_cast<double>(cell / w_padded) - 1.0;
        return (key % 2 == 0) ? std::array<double, 2>{x + 0.5, y} : std::array<double, 2>{x, y + 0.5};
    }

    std::vector<std::vector<std::array<double, 2>>> loops() const {
        std::vector<std::vector<std::array<double, 2>>> out;
        std::unordered_map<std::int64_t, bool> seen;
        seen.reserve(adj_.size());
        // Deterministic start order independent of hash layout.
        std::vector<std::int64_t> keys;
        keys.reserve(adj_.size());
        for (const auto& [k, _] : adj_) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (auto start : keys) {
            if (seen[start]) continue;
            std::vector<std::array<double, 2>> loop;
            std::int64_t prev = -1, cur = start;
            while (true) {
                seen[cur] = true;
                loop.push_back(coords(cur, w_));
                const auto& nb = adj_.at(cur);
                std::int64_t next = -1;
                for (auto c : nb) {
                    if (c != prev && !seen[c]) {
                        next = c;
                        break;
                    }
                }
                if (next < 0) break;
                prev = cur;
                cur = next;
            }
            out.push_back(std::move(loop));
        }
        return out;
    }

private:
    int w_;
    std::unordered_map<std::int64_t, std::vector<std::int64_t>> adj_;
};

double loop_length(const std::vector<std::array<double, 2>>& loop, double sigma) {
    const std::size_t n = loop.size();
    if (n < 2) return 0.0;
    std::vector<std::array<double, 2>> sm = loop;
    const int radius = std::min(static_cast<int>(std::ceil(3.0 * sigma)), static_cast<int>(n / 2));
    if (sigma > 0 && radius > 0) {
        std::vector<double> kern(static_cast<std::size_t>(2 * radius + 1));
        double ks = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            kern[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (sigma * sigma));
            ks += kern[static_cast<std::size_t>(k + radius)];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double sx = 0.0, sy = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const std::size_t j = (i + n + static_cast<std::size_t>(k + static_cast<int>(n))) % n;
                const double wk = kern[static_cast<std::size_t>(k + radius)];
                sx += wk * loop[j][0];
                sy += wk * loop[j][1];
            }
            sm[i] = {sx / ks, sy / ks};
        }
    }
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = sm[i];
        const auto& b = sm[(i + 1) % n];
        len += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    return len;
}

constexpr double kContourSmoothing = 1.0;  // vertices

}  // namespace

double boundary_length(const BinaryMask& mask) {
    if (mask.empty()) throw DataError("boundary_length: empty mask");
    ContourGraph g(mask.width);
    // Cell with top-left pixel centre (x,y); corners 0:(x,y) 1:(x+1,y) 2:(x+1,y+1) 3:(x,y+1).
    for (int y = -1; y < mask.height; ++y) {
        for (int x = -1; x < mask.width; ++x) {
            const bool c0 = mask.get(x, y), c1 = mask.get(x + 1, y), c2 = mask.get(x + 1, y + 1),
                       c3 = mask.get(x, y + 1);
            const int code = c0 | (c1 << 1) | (c2 << 2) | (c3 << 3);
            if (code == 0 || code == 15) continue;
            const std::int64_t top = g.hkey(x, y), bottom = g.hkey(x, y + 1);
            const std::int64_t left = g.vkey(x, y), right = g.vkey(x + 1, y);
            switch (code) {
                case 1: case 14: g.link(top, left); break;
                case 2: case 13: g.link(top, right); break;
                case 4: case 11: g.link(right, bottom); break;
                case 8: case 7: g.link(bottom, left); break;
                case 3: case 12: g.link(left, right); break;
                case 6: case 9: g.link(top, bottom); break;
                // Diagonal saddles: foreground is 8-connected, so the contour
                // cuts off the background corners.
                case 5:
                    g.link(top, right);
                    g.link(bottom, left);
                    break;
                case 10:
                    g.link(top, left);
                    g.link(right, bottom);
                    break;
                default: break;
            }
        }
    }
    double len = 0.0;
    for (const auto& loop : g.loops()) len += loop_length(loop, kContourSmoothing);
    return len * mask.scale;
}

std::vector<Pixel> boundary_pixels(const BinaryMask& mask) {
    std::vector<Pixel> out;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.get(x, y) &&
                (!mask.get(x - 1, y) || !mask.get(x + 1, y) || !mask.get(x, y - 1) || !mask.get(x, y + 1)))
                out.push_back({x, y});
    return out;
}

std::vector<int> default_box_sizes(int width, int height) {
    const int top = std::max(16, std::min(width, height) / 4);
    std::vector<int> s;
    for (int r = 2; r <= top; r *= 2) s.push_back(r);
    return s;
}

FractalFit box_count_dimension(const std::vector<Pixel>& boundary, const std::vector<int>& box_sizes) {
    if (boundary.empty()) throw DataError("box_count_dimension: empty boundary");
    if (box_sizes.size() < 2) throw DataError("box_count_dimension: need at least two box sizes");
    FractalFit fit;
    std::vector<double> lr, ln;
    std::vector<std::int64_t> cells;
    cells.reserve(boundary.size());
    for (int r : box_sizes) {
        if (r < 1) throw UsageError("box_count_dimension: box sizes must be positive");
        cells.clear();
        for (const auto& p : boundary) {
            const std::int64_t bx = p.x >= 0 ? p.x / r : -((-p.x + r - 1) / r);
            const std::int64_t by = p.y >= 0 ? p.y / r : -((-p.y + r - 1) / r);
            cells.push_back((by << 32) ^ (bx & 0xffffffff));
        }
        std::sort(cells.begin(), cells.end());
        const long n = static_cast<long>(std::unique(cells.begin(), cells.end()) - cells.begin());
        fit.box_sizes.push_back(r);
        fit.counts.push_back(n);
        lr.push_back(std::log(static_cast<double>(r)));
        ln.push_back(std::log(static_cast<double>(n)));
    }
    if (std::all_of(fit.counts.begin(), fit.counts.end(), [&](long c) { return c == fit.counts.front(); })) {
        fit.degenerate = true;
        fit.d_f = 1.0;
        fit.clamped = true;
        return fit;
    }
    const LineFit lf = fit_line(lr, ln);
    fit.raw_d_f = -lf.slope;
    fit.log_k = lf.intercept;
    fit.r_squared = lf.r_squared;
    fit.d_f = std::clamp(fit.raw_d_f, 1.0, 2.0);
    fit.clamped = fit.d_f != fit.raw_d_f;
    return fit;
}

MorphologyRecord measure_mask(const BinaryMask& mask, double time_h, Warnings* warnings) {
    MorphologyRecord r;
    r.time = time_h;
    if (mask.empty()) {
        warn(warnings, "empty mask at t = " + std::to_string(time_h) + " h");
        return r;
    }
    r.area = mask.area();
    r.perimeter = boundary_length(mask);
    r.circularity = clamp_circularity(circularity(r.area, r.perimeter), warnings);
    const auto fit = box_count_dimension(boundary_pixels(mask), default_box_sizes(mask.width, mask.height));
    if (fit.degenerate) {
        warn(warnings, "box counting degenerate at t = " + std::to_string(time_h) + " h");
    } else {
        if (fit.clamped) warn(warnings, "fractal dimension clamped to [1, 2]");
        r.fractal_dim = fit.d_f;
    }
    return r;
}

DeltaSeries delta_series(const MorphologySeries& series) {
    const auto& rec = series.records;
    if (rec.size() < 3) throw DataError("delta_series: need at least 3 records");
    for (const auto& r : rec)
        if (!r.circularity || !r.fractal_dim)
            throw DataError("delta_series: every record needs circularity and fractal dimension");
    DeltaSeries d;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        d.times.push_back(rec[i].time);
        d.abs_dC.push_back(std::abs(*rec[i].circularity - *rec[i - 1].circularity));
        d.abs_ddf.push_back(std::abs(*rec[i].fractal_dim - *rec[i - 1].fractal_dim));
    }
    auto normalize = [](std::vector<double>& v) {
        const double m = *std::max_element(v.begin(), v.end());
        if (m > 0)
            for (double& x : v) x /= m;
    };
    normalize(d.abs_dC);
    normalize(d.abs_ddf);
    d.pearson_r = pearson(d.abs_dC, d.abs_ddf);
    return d;
}

}  // namespace slimecap
