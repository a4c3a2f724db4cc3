#include "napmin/volume.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <json.hpp>
#include <stdexcept>

#include "napmin/rng.hpp"

namespace napmin {

using nlohmann::json;

std::string orthotope_to_json(const Orthotope& o) {
    json doc;
    doc["center"] = std::vector<double>(o.center.data(), o.center.data() + o.center.size());
    doc["lower"] = std::vector<double>(o.lower.data(), o.lower.data() + o.lower.size());
    doc["upper"] = std::vector<double>(o.upper.data(), o.upper.data() + o.upper.size());
    if (o.degenerate)
        doc["log_volume"] = nullptr;
    else
        doc["log_volume"] = o.log_volume;
    doc["degenerate"] = o.degenerate;
    return doc.dump(2);
}

Eigen::VectorXd pseudo_center(const Network& net, const Nap& p, const Eigen::MatrixXd& rows,
                              std::uint64_t seed) {
    std::vector<int> exhibiting;
    for (int r = 0; r < rows.rows(); ++r)
        if (exhibits(net, rows.row(r).transpose(), p)) exhibiting.push_back(r);
    if (exhibiting.empty())
        throw std::runtime_error("pseudo_center: no row exhibits the NAP");

    constexpr int kExactLimit = 2000;
    if (static_cast<int>(exhibiting.size()) > kExactLimit) {
        // Seeded uniform subsample without replacement (partial Fisher-Yates).
        Rng rng(seed);
        std::vector<int> pool = exhibiting;
        for (int i = 0; i < kExactLimit; ++i) {
            const std::uint64_t j =
                i + rng.uniform_int(static_cast<std::uint64_t>(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(kExactLimit);
        std::sort(pool.begin(), pool.end());
        exhibiting = std::move(pool);
    }

    const int m = static_cast<int>(exhibiting.size());
    int best = -1;
    double best_radius = 0.0;
    for (int i = 0; i < m; ++i) {
        double radius = 0.0;
        for (int j = 0; j < m; ++j) {
            const double d =
                (rows.row(exhibiting[i]) - rows.row(exhibiting[j])).lpNorm<Eigen::Infinity>();
            radius = std::max(radius, d);
        }
        bool better = best < 0 || radius < best_radius;
        if (!better && radius == best_radius) {
            // Tie: lexicographically smallest point, so the choice does not
            // depend on row order.
            for (int k = 0; k < rows.cols(); ++k) {
                const double a = rows(exhibiting[i], k);
                const double b = rows(exhibiting[best], k);
                if (a < b) { better = true; break; }
                if (a > b) break;
            }
        }
        if (better) {
            best = i;
            best_radius = radius;
        }
    }
    return rows.row(exhibiting[best]).transpose();
}

namespace {

// Largest e in [0, slack] with member(center + e*dir) true, member(0) given.
// Binary search to tol, then interior probes: region slices may be
// non-convex, so a passing endpoint does not imply the whole segment passes.
double expand_ray(const std::function<bool(double)>& member, double slack, double tol) {
    if (slack <= 0.0) return 0.0;
    double extent;
    if (member(slack)) {
        extent = slack;
    } else {
        double lo = 0.0, hi = slack;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (member(mid))
                lo = mid;
            else
                hi = mid;
        }
        extent = lo;
    }

    for (int round = 0; round < 8 && extent > tol; ++round) {
        bool shrunk = false;
        for (int j = 1; j <= 8; ++j) {
            const double t = extent * j / 9.0;
            if (!member(t)) {
                // First failing interior probe: resolve the boundary below it.
                double lo = extent * (j - 1) / 9.0, hi = t;
                while (hi - lo > tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (member(mid))
                        lo = mid;
                    else
                        hi = mid;
                }
                extent = lo;
                shrunk = true;
                break;
            }
        }
        if (!shrunk) break;
    }

    // Postcondition: member(extent) and (wall or not member(extent + tol)).
    while (!member(extent) && extent > 0.0) extent = std::max(0.0, extent - tol);
    while (extent + tol <= slack && member(extent + tol)) extent += tol;
    return extent;
}

}  // namespace

Orthotope expand_orthotope(const Network& net, const Nap& p, const Eigen::VectorXd& center,
                           const InputDomain& domain, double tol) {
    if (tol <= 0.0) throw std::runtime_error("expand_orthotope: tol must be positive");
    if (!exhibits(net, center, p))
        throw std::runtime_error("expand_orthotope: center does not exhibit the NAP");
    const int d = static_cast<int>(center.size());
    Orthotope o;
    o.center = center;
    o.lower.resize(d);
    o.upper.resize(d);
    for (int i = 0; i < d; ++i) {
        const auto member_up = [&](double e) {
            Eigen::VectorXd x = center;
            x[i] += e;
            return exhibits(net, x, p);
        };
        const auto member_down = [&](double e) {
            Eigen::VectorXd x = center;
            x[i] -= e;
            return exhibits(net, x, p);
        };
        o.upper[i] = expand_ray(member_up, domain.upper[i] - center[i], tol);
        o.lower[i] = expand_ray(member_down, center[i] - domain.lower[i], tol);
    }
    o.log_volume = log_volume(o);
    o.degenerate = !std::isfinite(o.log_volume);
    return o;
}

double log_volume(const Orthotope& o) {
    double sum = 0.0;
    for (int i = 0; i < o.lower.size(); ++i) {
        const double width = o.lower[i] + o.upper[i];
        if (width <= 0.0) return -std::numeric_limits<double>::infinity();
        sum += std::log(width);
    }
    return sum;
}

int volume_ratio_order(double log_a, double log_b) {
    if (!std::isfinite(log_a) || !std::isfinite(log_b))
        throw std::runtime_error("volume_ratio_order: degenerate log-volume input");
    return static_cast<int>(std::llround((log_a - log_b) / std::log(10.0)));
}

}  // namespace napmin
