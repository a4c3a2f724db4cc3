#include "napmin/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace napmin {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Dense tableau simplex, minimization, Bland's rule throughout. Rows hold
// [coefficients | rhs]; `basis[i]` is the column basic in row i.
struct Tableau {
    Eigen::MatrixXd rows;       // m x (cols + 1)
    Eigen::RowVectorXd cost;    // reduced-cost row, length cols + 1 (last = -objective)
    std::vector<int> basis;
    int cols = 0;

    void pivot(int prow, int pcol) {
        rows.row(prow) /= rows(prow, pcol);
        for (int i = 0; i < rows.rows(); ++i) {
            if (i == prow) continue;
            const double f = rows(i, pcol);
            if (f != 0.0) rows.row(i) -= f * rows.row(prow);
        }
        const double cf = cost(pcol);
        if (cf != 0.0) cost -= cf * rows.row(prow);
        basis[static_cast<size_t>(prow)] = pcol;
    }

    // Returns Optimal, Unbounded, or PivotLimit. `allowed(j)` filters entering
    // columns (used to bar artificials in phase 2).
    template <typename Allowed>
    LpStatus run(int& pivots, int max_pivots, Allowed allowed) {
        const int m = static_cast<int>(rows.rows());
        for (;;) {
            int enter = -1;
            for (int j = 0; j < cols; ++j) {
                if (!allowed(j)) continue;
                if (cost(j) < -kPivotTol) { enter = j; break; }  // Bland: lowest index
            }
            if (enter < 0) return LpStatus::Optimal;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = rows(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rows(i, cols) / a;
                if (leave < 0 || ratio < best_ratio - kPivotTol ||
                    (ratio < best_ratio + kPivotTol && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
            if (++pivots >= max_pivots) return LpStatus::PivotLimit;
        }
    }
};

}  // namespace

LpResult solve_box_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi, int max_pivots) {
    const int n = static_cast<int>(c.size());
    if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n) || lo.size() != n ||
        hi.size() != n)
        throw std::runtime_error("solve_box_lp: dimension mismatch");
    for (int i = 0; i < n; ++i)
        if (lo[i] > hi[i]) return {LpStatus::Infeasible, {}, 0.0, 0};

    // Shift to y = x - lo >= 0 and fold the upper bounds into extra rows.
    const int mA = static_cast<int>(A.rows());
    const int m = mA + n;
    Eigen::MatrixXd G(m, n);
    Eigen::VectorXd g(m);
    if (mA > 0) {
        G.topRows(mA) = A;
        g.head(mA) = b - A * lo;
    }
    G.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    g.tail(n) = hi - lo;

    // Columns: n structural, m slacks, then one artificial per negative-rhs row.
    std::vector<int> art_rows;
    for (int i = 0; i < m; ++i)
        if (g[i] < 0.0) art_rows.push_back(i);
    const int n_art = static_cast<int>(art_rows.size());
    const int cols = n + m + n_art;

    Tableau t;
    t.cols = cols;
    t.rows = Eigen::MatrixXd::Zero(m, cols + 1);
    t.basis.assign(m, -1);
    for (int i = 0; i < m; ++i) {
        const double sign = g[i] < 0.0 ? -1.0 : 1.0;
        t.rows.block(i, 0, 1, n) = sign * G.row(i);
        t.rows(i, n + i) = sign;  // slack
        t.rows(i, cols) = sign * g[i];
        t.basis[i] = n + i;
    }
    for (int k = 0; k < n_art; ++k) {
        const int i = art_rows[k];
        t.rows(i, n + m + k) = 1.0;
        t.basis[i] = n + m + k;
    }

    int pivots = 0;
    LpResult out;

    if (n_art > 0) {
        // Phase 1: minimize the artificial sum.
        t.cost = Eigen::RowVectorXd::Zero(cols + 1);
        for (int k = 0; k < n_art; ++k) t.cost(n + m + k) = 1.0;
        for (int i : art_rows) t.cost -= t.rows.row(i);

        const LpStatus st = t.run(pivots, max_pivots, [](int) { return true; });
        out.pivots = pivots;
        if (st == LpStatus::PivotLimit) {
            out.status = LpStatus::PivotLimit;
            return out;
        }
        if (-t.cost(cols) > kFeasTol) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Drive any artificial still basic (at level 0) out of the basis.
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < n + m) continue;
            int pcol = -1;
            for (int j = 0; j < n + m; ++j)
                if (std::abs(t.rows(i, j)) > kPivotTol) { pcol = j; break; }
            if (pcol >= 0) {
                t.pivot(i, pcol);
                ++pivots;
            }
            // Otherwise the row is redundant; the artificial stays basic at 0
            // and phase 2 bars artificial columns from entering.
        }
    }

    // Phase 2: original objective over the shifted variables.
    t.cost = Eigen::RowVectorXd::Zero(cols + 1);
    t.cost.head(n) = c.transpose();
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] < n) {
            const double cf = t.cost(t.basis[i]);
            if (cf != 0.0) t.cost -= cf * t.rows.row(i);
        }
    }
    const int n_m = n + m;
    const LpStatus st = t.run(pivots, max_pivots, [n_m](int j) { return j < n_m; });
    out.pivots = pivots;
    if (st != LpStatus::Optimal) {
        out.status = st;
        return out;
    }

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) y[t.basis[i]] = t.rows(i, cols);
    out.status = LpStatus::Optimal;
    out.x = y + lo;
    out.objective = c.dot(out.x);
    return out;
}

}  // namespace napmin
