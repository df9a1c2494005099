#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mmwloc/noise_profile.hpp"

namespace mmwloc {

struct Point2 {
    double x{};
    double y{};

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;

    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

enum class WallAxis { Vertical, Horizontal };
enum class Side { Positive, Negative };

/// Infinite axis-aligned reflecting line. `offset` is the x coordinate of a
/// vertical wall or the y coordinate of a horizontal one. Reflections only
/// happen for links whose endpoints are both strictly inside the half-plane
/// on `reflective_side`.
struct Wall {
    WallAxis axis{WallAxis::Vertical};
    double offset{};
    Side reflective_side{Side::Positive};

    friend bool operator==(const Wall&, const Wall&) = default;

    /// Signed distance, positive inside the reflective half-plane.
    double signed_distance(Point2 p) const;
    bool on_reflective_side(Point2 p) const { return signed_distance(p) > 0.0; }
};

struct Rect {
    double x_min{};
    double x_max{};
    double y_min{};
    double y_max{};

    bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
    Rect padded(double margin) const { return {x_min - margin, x_max + margin, y_min - margin, y_max + margin}; }
    bool valid() const { return x_min < x_max && y_min < y_max; }
};

/// World model: walls, fixed equipment and the area where users may be.
struct Scenario {
    std::string name;
    std::vector<Wall> walls;
    std::vector<Point2> fes;
    NoiseProfile noise;
    Rect region;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    /// Region grown to include every FE.
    Rect bounding_box() const;

    Scenario with_noise(NoiseProfile profile) const;
};

enum class PathKind { Los, Nlos };

struct PathDescriptor {
    PathKind kind{PathKind::Los};
    std::size_t fe_index{};
    std::optional<std::size_t> scatterer_index;
    std::optional<Point2> true_scatterer;
    std::optional<std::size_t> wall_index;

    bool is_los() const { return kind == PathKind::Los; }
};

/// Ordered paths, LOS first. NLOS scatterer indices run 0..nlos_count()-1
/// in path order.
class PathSet {
public:
    PathSet() = default;
    explicit PathSet(std::vector<PathDescriptor> paths);

    std::size_t size() const { return paths_.size(); }
    bool empty() const { return paths_.empty(); }
    std::size_t los_count() const { return los_count_; }
    std::size_t nlos_count() const { return paths_.size() - los_count_; }
    bool sufficient() const { return los_count_ >= 1 || nlos_count() >= 2; }

    const PathDescriptor& operator[](std::size_t i) const { return paths_[i]; }
    auto begin() const { return paths_.begin(); }
    auto end() const { return paths_.end(); }
    const std::vector<PathDescriptor>& descriptors() const { return paths_; }

    /// Keeps the listed paths (any order in `indices`; output keeps LOS-first
    /// order of the original) and renumbers scatterer indices.
    PathSet subset(const std::vector<std::size_t>& indices) const;

    /// Short label per path: "LOS1", "NLOS2", ...
    std::string label(std::size_t i) const;

private:
    std::vector<PathDescriptor> paths_;
    std::size_t los_count_{};
};

Point2 image_reflect(Point2 p, const Wall& w);

/// Reflection point on `w` of the single-bounce path fe -> wall -> ue, or
/// nothing when either endpoint is not strictly on the reflective side.
std::optional<Point2> specular_point(Point2 fe, Point2 ue, const Wall& w);

/// One LOS path per FE followed by one NLOS path per (FE, wall) pair that
/// admits a specular reflection. Throws DegenerateGeometry when the UE is
/// on/behind a wall or coincides with an FE or a reflection point.
PathSet enumerate_paths(const Scenario& s, Point2 ue);

}  // namespace mmwloc
