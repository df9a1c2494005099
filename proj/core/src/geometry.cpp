#include "mmwloc/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "mmwloc/errors.hpp"

namespace mmwloc {

namespace {

// Coincidence tolerance for degenerate UE placements.
constexpr double kCoincident = 1e-9;

}  // namespace

double Wall::signed_distance(Point2 p) const {
    const double coord = axis == WallAxis::Vertical ? p.x : p.y;
    const double d = coord - offset;
    return reflective_side == Side::Positive ? d : -d;
}

void Scenario::validate() const {
    if (fes.empty()) throw ConfigError("scenario '" + name + "': at least one FE is required");
    for (std::size_t i = 0; i < fes.size(); ++i) {
        if (!fes[i].finite()) throw ConfigError("scenario '" + name + "': FE " + std::to_string(i + 1) + " is not finite");
    }
    for (std::size_t i = 0; i < walls.size(); ++i) {
        if (!std::isfinite(walls[i].offset)) {
            throw ConfigError("scenario '" + name + "': wall " + std::to_string(i + 1) + " offset is not finite");
        }
        for (std::size_t j = i + 1; j < walls.size(); ++j) {
            if (walls[i].axis == walls[j].axis && walls[i].offset == walls[j].offset) {
                throw ConfigError("scenario '" + name + "': walls " + std::to_string(i + 1) + " and " +
                                  std::to_string(j + 1) + " coincide");
            }
        }
    }
    if (!region.valid()) throw ConfigError("scenario '" + name + "': region is empty");
    noise.validate();
}

Rect Scenario::bounding_box() const {
    Rect box = region;
    for (const auto& fe : fes) {
        box.x_min = std::min(box.x_min, fe.x);
        box.x_max = std::max(box.x_max, fe.x);
        box.y_min = std::min(box.y_min, fe.y);
        box.y_max = std::max(box.y_max, fe.y);
    }
    return box;
}

Scenario Scenario::with_noise(NoiseProfile profile) const {
    Scenario copy = *this;
    copy.noise = std::move(profile);
    return copy;
}

PathSet::PathSet(std::vector<PathDescriptor> paths) : paths_(std::move(paths)) {
    std::stable_partition(paths_.begin(), paths_.end(), [](const PathDescriptor& p) { return p.is_los(); });
    los_count_ = static_cast<std::size_t>(
        std::count_if(paths_.begin(), paths_.end(), [](const PathDescriptor& p) { return p.is_los(); }));
    std::size_t next = 0;
    for (auto& p : paths_) {
        if (p.is_los()) {
            p.scatterer_index.reset();
            p.true_scatterer.reset();
        } else {
            p.scatterer_index = next++;
        }
    }
}

PathSet PathSet::subset(const std::vector<std::size_t>& indices) const {
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<PathDescriptor> kept;
    kept.reserve(sorted.size());
    for (std::size_t i : sorted) {
        if (i >= paths_.size()) throw std::out_of_range("PathSet::subset: index out of range");
        kept.push_back(paths_[i]);
    }
    return PathSet(std::move(kept));
}

std::string PathSet::label(std::size_t i) const {
    const auto& p = paths_.at(i);
    if (p.is_los()) return "LOS" + std::to_string(i + 1);
    return "NLOS" + std::to_string(*p.scatterer_index + 1);
}

Point2 image_reflect(Point2 p, const Wall& w) {
    if (w.axis == WallAxis::Vertical) return {2.0 * w.offset - p.x, p.y};
    return {p.x, 2.0 * w.offset - p.y};
}

std::optional<Point2> specular_point(Point2 fe, Point2 ue, const Wall& w) {
    if (!w.on_reflective_side(fe) || !w.on_reflective_side(ue)) return std::nullopt;
    const Point2 img = image_reflect(fe, w);
    // Image and UE lie on opposite sides, so the crossing parameter is in (0, 1).
    const double a = w.signed_distance(img);
    const double b = w.signed_distance(ue);
    const double t = a / (a - b);
    Point2 s = img + t * (ue - img);
    if (w.axis == WallAxis::Vertical) {
        s.x = w.offset;
    } else {
        s.y = w.offset;
    }
    return s;
}

PathSet enumerate_paths(const Scenario& s, Point2 ue) {
    if (!ue.finite()) throw DegenerateGeometry("UE position is not finite");
    for (std::size_t w = 0; w < s.walls.size(); ++w) {
        if (!s.walls[w].on_reflective_side(ue)) {
            std::ostringstream msg;
            msg << "UE (" << ue.x << ", " << ue.y << ") is not strictly inside wall " << w + 1;
            throw DegenerateGeometry(msg.str());
        }
    }
    std::vector<PathDescriptor> paths;
    for (std::size_t k = 0; k < s.fes.size(); ++k) {
        if (distance(s.fes[k], ue) <= kCoincident) {
            throw DegenerateGeometry("UE coincides with FE " + std::to_string(k + 1));
        }
        paths.push_back(PathDescriptor{PathKind::Los, k, std::nullopt, std::nullopt, std::nullopt});
    }
    for (std::size_t k = 0; k < s.fes.size(); ++k) {
        for (std::size_t w = 0; w < s.walls.size(); ++w) {
            auto sp = specular_point(s.fes[k], ue, s.walls[w]);
            if (!sp) continue;
            if (distance(*sp, ue) <= kCoincident || distance(*sp, s.fes[k]) <= kCoincident) {
                throw DegenerateGeometry("UE coincides with a reflection point");
            }
            paths.push_back(PathDescriptor{PathKind::Nlos, k, std::nullopt, *sp, w});
        }
    }
    return PathSet(std::move(paths));
}

}  // namespace mmwloc
