#pragma once

// Test-only reference computations. Nothing here calls the estimator's
// likelihood model or the grid initializer; likelihood terms are rebuilt
// from path_params and wrap directly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmwloc/estimator.hpp"
#include "mmwloc/measurement.hpp"

namespace mmwloc::oracle {

/// Log-likelihood contribution (without normalizer) of path j of `z` for
/// the given UE and scatterer.
inline double path_term(const Observation& z, const Scenario& scenario, std::size_t j, Point2 ue, Point2 s) {
    const auto n = static_cast<Eigen::Index>(z.paths.size());
    const auto k = static_cast<Eigen::Index>(j);
    ParamVector theta{ue, {}, Mode::NoRem};
    PathDescriptor path = z.paths[j];
    if (!path.is_los()) {
        theta.scatterers.assign(*path.scatterer_index + 1, s);
    }
    PathParams pp;
    try {
        pp = path_params(path, theta, scenario);
    } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
    }
    const double ra = wrap(z.alpha[k] - pp.alpha);
    const double rb = wrap(z.beta[k] - pp.beta);
    const double rd = z.dist[k] - pp.d;
    return -0.5 * (ra * ra / z.covariance_diag[k] + rb * rb / z.covariance_diag[n + k] +
                   rd * rd / z.covariance_diag[2 * n + k]);
}

inline std::vector<Point2> lattice(const Rect& box, double spacing) {
    std::vector<Point2> out;
    const auto nx = static_cast<long>(std::floor((box.x_max - box.x_min) / spacing + 1e-9));
    const auto ny = static_cast<long>(std::floor((box.y_max - box.y_min) / spacing + 1e-9));
    for (long i = 0; i <= nx; ++i) {
        for (long j = 0; j <= ny; ++j) {
            out.push_back({box.x_min + static_cast<double>(i) * spacing, box.y_min + static_cast<double>(j) * spacing});
        }
    }
    return out;
}

struct GlobalMax {
    ParamVector theta;
    double log_likelihood{-std::numeric_limits<double>::infinity()};
};

/// Global maximum of the NoRem likelihood: exhaustive search over the
/// product grid of UE and every scatterer (the likelihood separates into
/// per-path terms once the UE is fixed, so the product grid is scanned as
/// nested 2-D scans), then local refinement from the best `n_starts` local
/// maxima of the UE profile.
inline GlobalMax global_max_norem(const Observation& z, const Scenario& scenario, const Rect& box,
                                  double ue_spacing, double scatterer_spacing, std::size_t n_starts,
                                  const GapfConfig& refine_cfg) {
    const std::vector<Point2> ue_nodes = lattice(box, ue_spacing);
    const std::vector<Point2> s_nodes = lattice(box, scatterer_spacing);
    const std::size_t nl = z.paths.los_count();
    const std::size_t nn = z.paths.nlos_count();

    struct Node {
        double profile;
        std::vector<Point2> scatterers;
    };
    std::vector<Node> profile(ue_nodes.size());
    for (std::size_t u = 0; u < ue_nodes.size(); ++u) {
        Node& node = profile[u];
        node.profile = 0.0;
        for (std::size_t j = 0; j < nl; ++j) node.profile += path_term(z, scenario, j, ue_nodes[u], {});
        node.scatterers.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (const Point2& s : s_nodes) {
                const double v = path_term(z, scenario, nl + i, ue_nodes[u], s);
                if (v > best) {
                    best = v;
                    node.scatterers[i] = s;
                }
            }
            node.profile += best;
        }
    }

    // Local maxima of the UE profile on the lattice (8-neighbourhood).
    const auto nx = static_cast<long>(std::floor((box.x_max - box.x_min) / ue_spacing + 1e-9)) + 1;
    const auto ny = static_cast<long>(std::floor((box.y_max - box.y_min) / ue_spacing + 1e-9)) + 1;
    std::vector<std::size_t> peaks;
    for (long i = 0; i < nx; ++i) {
        for (long j = 0; j < ny; ++j) {
            const double v = profile[static_cast<std::size_t>(i * ny + j)].profile;
            bool peak = std::isfinite(v);
            for (long di = -1; di <= 1 && peak; ++di) {
                for (long dj = -1; dj <= 1 && peak; ++dj) {
                    const long a = i + di;
                    const long b = j + dj;
                    if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nx || b >= ny) continue;
                    if (profile[static_cast<std::size_t>(a * ny + b)].profile > v) peak = false;
                }
            }
            if (peak) peaks.push_back(static_cast<std::size_t>(i * ny + j));
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return profile[a].profile > profile[b].profile; });
    if (peaks.size() > n_starts) peaks.resize(n_starts);

    GlobalMax result;
    for (std::size_t idx : peaks) {
        const ParamVector start{ue_nodes[idx], profile[idx].scatterers, Mode::NoRem};
        try {
            const ParamVector refined = lm_refine(z, start, scenario, refine_cfg);
            const double ll = log_likelihood(z, refined, scenario);
            if (ll > result.log_likelihood) {
                result.log_likelihood = ll;
                result.theta = refined;
            }
        } catch (const Error&) {
        }
    }
    return result;
}

}  // namespace mmwloc::oracle
