#pragma once

#include <cstdint>
#include <string>

#include "napmin/nap.hpp"
#include "napmin/network.hpp"

namespace napmin {

struct Orthotope {
    Eigen::VectorXd center;
    Eigen::VectorXd lower;  // extent below the center per dimension, >= 0
    Eigen::VectorXd upper;  // extent above the center per dimension, >= 0
    bool degenerate = false;
    double log_volume = 0.0;
};

std::string orthotope_to_json(const Orthotope& o);

// Exhibiting row minimizing the maximal L-inf distance to the other
// exhibiting rows; exact up to 2000 candidates, seeded subsample beyond.
Eigen::VectorXd pseudo_center(const Network& net, const Nap& p, const Eigen::MatrixXd& rows,
                              std::uint64_t seed = 0);

// Per-dimension two-sided binary search on region membership from the anchor,
// with interior probes guarding against non-convex pockets.
Orthotope expand_orthotope(const Network& net, const Nap& p, const Eigen::VectorXd& center,
                           const InputDomain& domain, double tol = 1e-4);

double log_volume(const Orthotope& o);
int volume_ratio_order(double log_a, double log_b);

}  // namespace napmin
