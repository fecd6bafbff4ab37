#include "factoryguard/perception.hpp"

#include <algorithm>
#include <cmath>

namespace fg::perception {

double fire_severity(double det_area, double frame_area, double confidence) {
    if (!(frame_area > 0.0)) throw DomainError("fire_severity: frame area must be positive");
    if (!(det_area >= 0.0) || det_area > frame_area) {
        throw DomainError("fire_severity: detection area must lie in [0, frame area]");
    }
    if (!(confidence >= 0.0 && confidence <= 1.0)) throw DomainError("fire_severity: confidence outside [0, 1]");
    return det_area / frame_area * confidence;
}

ThermalImage thermal_diff(const ThermalImage& current, const ThermalImage& baseline) {
    if (current.width() != baseline.width() || current.height() != baseline.height()) {
        throw ShapeError("thermal_diff: image dimensions differ");
    }
    ThermalImage out(current.width(), current.height());
    const auto& a = current.temps();
    const auto& b = baseline.temps();
    auto& d = out.temps();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return out;
}

std::vector<AnomalyRegion> anomaly_regions(const ThermalImage& delta, double tau_warning) {
    if (!(tau_warning > 0.0)) throw DomainError("anomaly_regions: threshold must be positive");
    const int w = delta.width();
    const int h = delta.height();
    std::vector<int> label(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
    std::vector<AnomalyRegion> regions;
    std::vector<Pixel> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto seed = static_cast<std::size_t>(y * w + x);
            if (label[seed] >= 0 || !(delta.at(x, y) > tau_warning)) continue;
            const int id = static_cast<int>(regions.size());
            AnomalyRegion r;
            r.max_delta = -INFINITY;
            label[seed] = id;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                r.pixels.push_back(p);
                const double t = delta.at(p.x, p.y);
                if (t > r.max_delta || (t == r.max_delta && p < r.peak)) {
                    r.max_delta = t;
                    r.peak = p;
                }
                const Pixel nbrs[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
                for (const Pixel n : nbrs) {
                    if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
                    const auto ni = static_cast<std::size_t>(n.y * w + n.x);
                    if (label[ni] >= 0 || !(delta.at(n.x, n.y) > tau_warning)) continue;
                    label[ni] = id;
                    stack.push_back(n);
                }
            }
            std::sort(r.pixels.begin(), r.pixels.end(),
                      [](Pixel a, Pixel b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
            double sx = 0.0, sy = 0.0;
            for (const Pixel p : r.pixels) {
                sx += p.x;
                sy += p.y;
            }
            r.centroid_x = sx / static_cast<double>(r.pixels.size());
            r.centroid_y = sy / static_cast<double>(r.pixels.size());
            regions.push_back(std::move(r));
        }
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](const AnomalyRegion& a, const AnomalyRegion& b) { return a.max_delta > b.max_delta; });
    return regions;
}

Point3 backproject(double u, double v, double Z, const CameraIntrinsics& k) {
    if (!(Z > 0.0)) throw DomainError("backproject: depth must be positive");
    return {Z * (u - k.cx) / k.fx, Z * (v - k.cy) / k.fy, Z};
}

PixelCoord project(const Point3& p, const CameraIntrinsics& k) {
    if (!(p.Z > 0.0)) throw DomainError("project: point must lie in front of the camera");
    return {k.cx + k.fx * p.X / p.Z, k.cy + k.fy * p.Y / p.Z};
}

ThermalProfile thermal_profile(const Pipe& pipe, double step) {
    if (!(step > 0.0)) throw DomainError("thermal_profile: step must be positive");
    ThermalProfile prof;
    const double len = pipe.length();
    const auto n = static_cast<std::size_t>(std::floor(len / step + 1e-9)) + 1;
    prof.positions.reserve(n);
    prof.temps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) * step;
        prof.positions.push_back(s);
        prof.temps.push_back(pipe.temp_at(s));
    }
    prof.peak_index = static_cast<std::size_t>(
        std::distance(prof.temps.begin(), std::max_element(prof.temps.begin(), prof.temps.end())));
    return prof;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine_similarity: zero-norm input");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

MatchResult match_person_detail(std::span<const double> query, const memory::PersonnelDB& db, double threshold) {
    MatchResult res;
    // std::map iterates ids in lexicographic order, so strict > keeps the
    // smallest id among equal similarities.
    for (const auto& [id, rec] : db.entries()) {
        const double s = cosine_similarity(query, rec.embedding);
        if (!res.best_id || s > res.best_similarity) {
            res.best_similarity = s;
            res.best_id = id;
        }
    }
    if (res.best_id && res.best_similarity >= threshold) res.id = res.best_id;
    return res;
}

std::optional<std::string> match_person(std::span<const double> query, const memory::PersonnelDB& db,
                                        double threshold) {
    return match_person_detail(query, db, threshold).id;
}

}  // namespace fg::perception
