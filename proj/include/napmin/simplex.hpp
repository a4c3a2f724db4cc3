#pragma once

#include <Eigen/Dense>

namespace napmin {

enum class LpStatus { Optimal, Infeasible, Unbounded, PivotLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;       // argmin in the original coordinates (Optimal only)
    double objective = 0.0;  // c.dot(x) at the optimum
    int pivots = 0;
};

// Minimize c.dot(x) subject to A x <= b and lo <= x <= hi, solved by a dense
// two-phase simplex with Bland's rule (anti-cycling; deterministic pivots).
// The box is part of the formulation, so every variable is bounded and the
// Unbounded status cannot occur for well-formed inputs.
LpResult solve_box_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi, int max_pivots = 200000);

}  // namespace napmin
