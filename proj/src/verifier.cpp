#include "napmin/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "napmin/parallel.hpp"

namespace napmin {

using nlohmann::json;

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Verified: return "Verified";
        case Verdict::Falsified: return "Falsified";
        default: return "Unknown";
    }
}

RobustnessQuery load_query(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open query file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("query parse failure in " + path + ": " + e.what());
    }
    RobustnessQuery q;
    try {
        q.target_class = doc.at("class").get<int>();
        const auto& dom = doc.at("domain");
        const std::vector<double> lo = dom.at("lower").get<std::vector<double>>();
        const std::vector<double> hi = dom.at("upper").get<std::vector<double>>();
        if (lo.size() != hi.size())
            throw std::runtime_error("query domain bounds differ in length");
        q.domain.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
        q.domain.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size());
        if (doc.contains("ball") && !doc.at("ball").is_null()) {
            const auto& jb = doc.at("ball");
            Ball ball;
            const std::vector<double> ctr = jb.at("center").get<std::vector<double>>();
            ball.center = Eigen::Map<const Eigen::VectorXd>(ctr.data(), ctr.size());
            ball.eps = jb.at("eps").get<double>();
            q.ball = ball;
        }
        if (doc.contains("tau")) q.tau = doc.at("tau").get<double>();
        if (doc.contains("phase_budget"))
            q.phase_budget = doc.at("phase_budget").get<std::uint64_t>();
        if (doc.contains("time_budget_ms"))
            q.time_budget_ms = doc.at("time_budget_ms").get<std::int64_t>();
    } catch (const json::exception& e) {
        throw std::runtime_error("query schema error in " + path + ": " + e.what());
    }
    for (int i = 0; i < q.domain.lower.size(); ++i)
        if (q.domain.lower[i] > q.domain.upper[i])
            throw std::runtime_error("query domain has lower > upper");
    if (!(q.tau > 0.0)) throw std::runtime_error("query tau must be positive");
    if (q.ball) {
        if (q.ball->eps < 0.0) throw std::runtime_error("query ball eps must be nonnegative");
        if (q.ball->center.size() != q.domain.lower.size())
            throw std::runtime_error("query ball center length mismatch");
        if (!q.domain.contains(q.ball->center))
            throw std::runtime_error("query ball center outside domain");
    }
    return q;
}

void save_query(const RobustnessQuery& q, const std::string& path) {
    json doc;
    doc["class"] = q.target_class;
    doc["domain"]["lower"] = std::vector<double>(q.domain.lower.data(),
                                                 q.domain.lower.data() + q.domain.lower.size());
    doc["domain"]["upper"] = std::vector<double>(q.domain.upper.data(),
                                                 q.domain.upper.data() + q.domain.upper.size());
    if (q.ball) {
        doc["ball"]["center"] = std::vector<double>(q.ball->center.data(),
                                                    q.ball->center.data() + q.ball->center.size());
        doc["ball"]["eps"] = q.ball->eps;
    } else {
        doc["ball"] = nullptr;
    }
    doc["tau"] = q.tau;
    doc["phase_budget"] = q.phase_budget;
    doc["time_budget_ms"] = q.time_budget_ms;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write query file: " + path);
    out << doc.dump(2) << "\n";
}

namespace {

constexpr double kBoundTol = 1e-9;

// Interval propagation over an explicit state vector; used both for the public
// NAP form and for partially assigned phases during enumeration.
NeuronBounds bounds_for_states(const Network& net, const InputDomain& box,
                               const std::vector<ActivationState>& states) {
    NeuronBounds nb;
    Eigen::VectorXd pl = box.lower;
    Eigen::VectorXd pu = box.upper;
    int ordinal = 0;
    for (int l = 1; l < net.depth(); ++l) {
        const Eigen::MatrixXd& w = net.layers[l - 1].weights;
        const Eigen::VectorXd& b = net.layers[l - 1].bias;
        Eigen::VectorXd zl(w.rows()), zu(w.rows());
        for (int i = 0; i < w.rows(); ++i) {
            double lo = b[i], hi = b[i];
            for (int j = 0; j < w.cols(); ++j) {
                const double wij = w(i, j);
                if (wij >= 0.0) {
                    lo += wij * pl[j];
                    hi += wij * pu[j];
                } else {
                    lo += wij * pu[j];
                    hi += wij * pl[j];
                }
            }
            zl[i] = lo;
            zu[i] = hi;
        }
        nb.lower.push_back(zl);
        nb.upper.push_back(zu);
        pl.resize(w.rows());
        pu.resize(w.rows());
        for (int i = 0; i < w.rows(); ++i, ++ordinal) {
            switch (states[ordinal]) {
                case ActivationState::Zero:
                    pl[i] = 0.0;
                    pu[i] = 0.0;
                    break;
                default:  // Star and One share the ReLU image; One adds z >= 0
                    pl[i] = std::max(0.0, zl[i]);
                    pu[i] = std::max(0.0, zu[i]);
                    break;
            }
        }
    }
    return nb;
}

bool bounds_contradict(const Network& net, const NeuronBounds& nb,
                       const std::vector<ActivationState>& states) {
    int ordinal = 0;
    for (int l = 1; l < net.depth(); ++l) {
        for (int i = 0; i < net.hidden_width(l); ++i, ++ordinal) {
            if (states[ordinal] == ActivationState::Zero &&
                nb.lower[l - 1][i] > kBoundTol)
                return true;
            if (states[ordinal] == ActivationState::One &&
                nb.upper[l - 1][i] < -kBoundTol)
                return true;
        }
    }
    return false;
}

// Affine maps z_l = A_l x + c_l composed through the locked ReLU pattern,
// plus the output map.
struct ComposedAffine {
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::VectorXd> c;
    Eigen::MatrixXd a_out;
    Eigen::VectorXd c_out;
};

ComposedAffine compose_phases(const Network& net, const PhaseAssignment& phase) {
    ComposedAffine out;
    Eigen::MatrixXd cur_a;
    Eigen::VectorXd cur_c;
    int ordinal = 0;
    for (int l = 1; l < net.depth(); ++l) {
        const Eigen::MatrixXd& w = net.layers[l - 1].weights;
        const Eigen::VectorXd& b = net.layers[l - 1].bias;
        Eigen::MatrixXd a = l == 1 ? w : Eigen::MatrixXd(w * cur_a);
        Eigen::VectorXd c = l == 1 ? b : Eigen::VectorXd(w * cur_c + b);
        out.A.push_back(a);
        out.c.push_back(c);
        cur_a = a;
        cur_c = c;
        for (int i = 0; i < a.rows(); ++i, ++ordinal) {
            if (phase.phase[ordinal] == Phase::Inactive) {
                cur_a.row(i).setZero();
                cur_c[i] = 0.0;
            }
        }
    }
    out.a_out = net.layers.back().weights * cur_a;
    out.c_out = net.layers.back().weights * cur_c + net.layers.back().bias;
    return out;
}

// Phase constraint rows (A_con x <= b_con); `one_tighten` adds z >= tighten
// for the listed ordinals on top of their Active closure rows.
void phase_constraint_rows(const Network& net, const ComposedAffine& maps,
                           const PhaseAssignment& phase, Eigen::MatrixXd& a_con,
                           Eigen::VectorXd& b_con,
                           const std::vector<char>* tighten_mask = nullptr,
                           double tighten = 0.0) {
    const int n = net.input_dim;
    const int rows = net.hidden_count();
    a_con.resize(rows, n);
    b_con.resize(rows);
    int ordinal = 0;
    int r = 0;
    for (size_t l = 0; l < maps.A.size(); ++l) {
        for (int i = 0; i < maps.A[l].rows(); ++i, ++ordinal, ++r) {
            if (phase.phase[ordinal] == Phase::Active) {
                const double shift =
                    (tighten_mask && (*tighten_mask)[ordinal]) ? tighten : 0.0;
                a_con.row(r) = -maps.A[l].row(i);
                b_con[r] = maps.c[l][i] - shift;
            } else {
                a_con.row(r) = maps.A[l].row(i);
                b_con[r] = -maps.c[l][i];
            }
        }
    }
}

Eigen::VectorXd objective_row(const Network& net, const ComposedAffine& maps, int c, int k,
                              double& constant) {
    if (net.output_dim() == 1) {
        constant = maps.c_out[0];
        return maps.a_out.row(0).transpose();
    }
    constant = maps.c_out[c] - maps.c_out[k];
    return (maps.a_out.row(c) - maps.a_out.row(k)).transpose();
}

struct LeafOutcome {
    bool feasible = false;
    bool lp_trouble = false;  // pivot limit or unbounded anywhere in the leaf
    double min_margin = 0.0;
    Eigen::VectorXd argmin;
    int arg_rival = -1;
    std::uint64_t lp_solves = 0;
};

LeafOutcome solve_leaf(const Network& net, const PhaseAssignment& phase,
                       const InputDomain& box, int c, int pivot_budget) {
    LeafOutcome out;
    const ComposedAffine maps = compose_phases(net, phase);
    Eigen::MatrixXd a_con;
    Eigen::VectorXd b_con;
    phase_constraint_rows(net, maps, phase, a_con, b_con);

    std::vector<int> rivals;
    if (net.output_dim() == 1) {
        rivals.push_back(-1);
    } else {
        for (int k = 0; k < net.output_dim(); ++k)
            if (k != c) rivals.push_back(k);
    }

    bool first = true;
    for (int k : rivals) {
        double constant = 0.0;
        const Eigen::VectorXd obj = objective_row(net, maps, c, k, constant);
        const LpResult lp =
            solve_box_lp(obj, a_con, b_con, box.lower, box.upper, pivot_budget);
        ++out.lp_solves;
        if (lp.status == LpStatus::Infeasible) {
            // The feasible set does not depend on the rival; the phase region
            // is empty.
            out.feasible = false;
            return out;
        }
        if (lp.status != LpStatus::Optimal) {
            out.lp_trouble = true;
            return out;
        }
        const double value = lp.objective + constant;
        if (first || value < out.min_margin) {
            out.min_margin = value;
            out.argmin = lp.x;
            out.arg_rival = k;
            first = false;
        }
    }
    out.feasible = true;
    return out;
}

Eigen::VectorXd clamp_to_box(const Eigen::VectorXd& x, const InputDomain& box) {
    Eigen::VectorXd out = x;
    for (int i = 0; i < out.size(); ++i)
        out[i] = std::min(box.upper[i], std::max(box.lower[i], out[i]));
    return out;
}

bool closure_exhibits(const Network& net, const Eigen::VectorXd& x, const Nap& p) {
    const ActivationTrace trace = forward(net, x);
    int ordinal = 0;
    for (const Eigen::VectorXd& z : trace.pre) {
        for (int i = 0; i < z.size(); ++i, ++ordinal) {
            if (p.state(ordinal) == ActivationState::Zero && z[i] > 0.0) return false;
            if (p.state(ordinal) == ActivationState::One && z[i] < 0.0) return false;
        }
    }
    return true;
}

struct Enumeration {
    std::vector<PhaseAssignment> leaves;
    std::uint64_t pruned = 0;
    bool exhausted = false;
};

// Depth-first expansion of the Star neurons in global order, Inactive branch
// first. Bound-propagation pruning is optional and only removes provably empty
// subtrees, so it cannot change the verdict.
Enumeration enumerate_phases(const Network& net, const InputDomain& box,
                             const std::vector<ActivationState>& base_states,
                             std::uint64_t phase_budget, bool prune,
                             const std::chrono::steady_clock::time_point& deadline) {
    Enumeration en;
    std::vector<int> stars;
    for (int i = 0; i < static_cast<int>(base_states.size()); ++i)
        if (base_states[i] == ActivationState::Star) stars.push_back(i);

    std::vector<ActivationState> states = base_states;

    const std::function<void(size_t)> dfs = [&](size_t idx) {
        if (en.exhausted) return;
        if (std::chrono::steady_clock::now() > deadline) {
            en.exhausted = true;
            return;
        }
        if (prune) {
            const NeuronBounds nb = bounds_for_states(net, box, states);
            if (bounds_contradict(net, nb, states)) {
                ++en.pruned;
                return;
            }
        }
        if (idx == stars.size()) {
            if (en.leaves.size() >= phase_budget) {
                en.exhausted = true;
                return;
            }
            PhaseAssignment pa;
            pa.phase.resize(states.size());
            for (size_t i = 0; i < states.size(); ++i)
                pa.phase[i] = states[i] == ActivationState::Zero ? Phase::Inactive
                                                                 : Phase::Active;
            en.leaves.push_back(std::move(pa));
            return;
        }
        const int n = stars[idx];
        states[n] = ActivationState::Zero;
        dfs(idx + 1);
        states[n] = ActivationState::One;
        dfs(idx + 1);
        states[n] = ActivationState::Star;
    };
    dfs(0);
    return en;
}

InputDomain effective_box(const RobustnessQuery& q) {
    InputDomain box = q.domain;
    if (q.ball) {
        for (int i = 0; i < box.lower.size(); ++i) {
            box.lower[i] = std::max(box.lower[i], q.ball->center[i] - q.ball->eps);
            box.upper[i] = std::min(box.upper[i], q.ball->center[i] + q.ball->eps);
        }
    }
    return box;
}

}  // namespace

NeuronBounds bound_propagation(const Network& net, const InputDomain& box, const Nap& p) {
    if (p.signature() != net.signature())
        throw std::runtime_error("NAP signature does not match network");
    std::vector<ActivationState> states;
    states.reserve(p.neuron_count());
    for (int i = 0; i < p.neuron_count(); ++i) states.push_back(p.state(i));
    return bounds_for_states(net, box, states);
}

MinMarginResult min_margin_under_phase(const Network& net, const PhaseAssignment& phase,
                                       const InputDomain& box, int c, int k,
                                       int max_pivots) {
    if (static_cast<int>(phase.phase.size()) != net.hidden_count())
        throw std::runtime_error("phase assignment must be total");
    const ComposedAffine maps = compose_phases(net, phase);
    Eigen::MatrixXd a_con;
    Eigen::VectorXd b_con;
    phase_constraint_rows(net, maps, phase, a_con, b_con);
    double constant = 0.0;
    const Eigen::VectorXd obj = objective_row(net, maps, c, k, constant);
    const LpResult lp = solve_box_lp(obj, a_con, b_con, box.lower, box.upper, max_pivots);
    MinMarginResult out;
    out.lp_status = lp.status;
    if (lp.status == LpStatus::Optimal) {
        out.feasible = true;
        out.value = lp.objective + constant;
        out.argmin = lp.x;
    }
    return out;
}

VerificationResult verify(const Network& net, const Nap& p, const RobustnessQuery& query,
                          const VerifyOptions& opts) {
    if (p.signature() != net.signature())
        throw std::runtime_error("NAP signature does not match network");
    if (query.domain.lower.size() != net.input_dim)
        throw std::runtime_error("query domain dimension does not match network");
    const int m = net.output_dim();
    if (m != 1 && (query.target_class < 0 || query.target_class >= m))
        throw std::runtime_error("query class out of range");
    if (!(query.tau > 0.0)) throw std::runtime_error("query tau must be positive");

    VerificationResult result;
    const auto start = std::chrono::steady_clock::now();
    if (query.time_budget_ms <= 0) {
        result.verdict = Verdict::Unknown;
        return result;
    }
    const auto deadline = start + std::chrono::milliseconds(query.time_budget_ms);

    const InputDomain box = effective_box(query);
    for (int i = 0; i < box.lower.size(); ++i) {
        if (box.lower[i] > box.upper[i]) {
            result.verdict = Verdict::Verified;  // empty region, vacuous
            return result;
        }
    }

    std::vector<ActivationState> base;
    base.reserve(p.neuron_count());
    for (int i = 0; i < p.neuron_count(); ++i) base.push_back(p.state(i));

    Enumeration en =
        enumerate_phases(net, box, base, query.phase_budget, opts.prune, deadline);
    result.stats.phases_pruned = en.pruned;
    result.stats.phases_explored = en.leaves.size();

    std::vector<LeafOutcome> outcomes(en.leaves.size());
    parallel_for(static_cast<int>(en.leaves.size()), opts.threads, [&](int i) {
        outcomes[i] = solve_leaf(net, en.leaves[i], box, query.target_class,
                                 opts.lp_pivot_budget);
    });

    bool lp_trouble = false;
    struct Candidate {
        double margin;
        int leaf;
    };
    std::vector<Candidate> candidates;
    for (size_t i = 0; i < outcomes.size(); ++i) {
        result.stats.lp_solves += outcomes[i].lp_solves;
        if (outcomes[i].lp_trouble) lp_trouble = true;
        if (outcomes[i].feasible && outcomes[i].min_margin <= query.tau)
            candidates.push_back({outcomes[i].min_margin, static_cast<int>(i)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.margin != b.margin) return a.margin < b.margin;
                         return a.leaf < b.leaf;
                     });

    std::vector<char> one_mask(p.neuron_count(), 0);
    for (int i = 0; i < p.neuron_count(); ++i)
        if (p.state(i) == ActivationState::One) one_mask[i] = 1;

    for (const Candidate& cand : candidates) {
        const LeafOutcome& leaf = outcomes[cand.leaf];
        Eigen::VectorXd x = clamp_to_box(leaf.argmin, box);
        double concrete = margin(net, x, query.target_class);
        if (concrete <= query.tau && exhibits(net, x, p)) {
            result.verdict = Verdict::Falsified;
            result.counterexample = x;
            result.counterexample_margin = concrete;
            return result;
        }
        // Boundary case: the LP point sits on a locked One hyperplane. Push the
        // One constraints inward by tau and try once more.
        const ComposedAffine maps = compose_phases(net, en.leaves[cand.leaf]);
        Eigen::MatrixXd a_con;
        Eigen::VectorXd b_con;
        phase_constraint_rows(net, maps, en.leaves[cand.leaf], a_con, b_con, &one_mask,
                              query.tau);
        double constant = 0.0;
        const Eigen::VectorXd obj =
            objective_row(net, maps, query.target_class, leaf.arg_rival, constant);
        const LpResult lp =
            solve_box_lp(obj, a_con, b_con, box.lower, box.upper, opts.lp_pivot_budget);
        ++result.stats.lp_solves;
        if (lp.status != LpStatus::Optimal) continue;
        if (lp.objective + constant > query.tau) continue;
        x = clamp_to_box(lp.x, box);
        concrete = margin(net, x, query.target_class);
        if (concrete <= query.tau && exhibits(net, x, p)) {
            result.verdict = Verdict::Falsified;
            result.counterexample = x;
            result.counterexample_margin = concrete;
            return result;
        }
    }

    if (!candidates.empty() || en.exhausted || lp_trouble) {
        result.verdict = Verdict::Unknown;
        return result;
    }
    result.verdict = Verdict::Verified;
    return result;
}

NonAmbiguityResult check_non_ambiguity(const Network& net, const Nap& p1, const Nap& p2,
                                       const InputDomain& domain,
                                       const VerifyOptions& opts) {
    if (p1.signature() != p2.signature() || p1.signature() != net.signature())
        throw std::runtime_error("NAP signature mismatch");

    NonAmbiguityResult result;
    std::vector<ActivationState> merged(p1.neuron_count(), ActivationState::Star);
    for (int i = 0; i < p1.neuron_count(); ++i) {
        const ActivationState a = p1.state(i);
        const ActivationState b = p2.state(i);
        if (a != ActivationState::Star && b != ActivationState::Star && a != b) {
            result.disjoint = true;  // statewise contradiction, no region overlap
            return result;
        }
        merged[i] = a == ActivationState::Star ? b : a;
    }

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(10000);
    Enumeration en =
        enumerate_phases(net, domain, merged, 1u << 20, opts.prune, deadline);
    if (en.exhausted) {
        result.disjoint = false;
        result.exhausted = true;
        return result;
    }

    std::vector<int> one_ordinals;
    for (int i = 0; i < static_cast<int>(merged.size()); ++i)
        if (merged[i] == ActivationState::One) one_ordinals.push_back(i);

    const int n = net.input_dim;
    for (const PhaseAssignment& leaf : en.leaves) {
        const ComposedAffine maps = compose_phases(net, leaf);
        Eigen::MatrixXd a_con;
        Eigen::VectorXd b_con;
        phase_constraint_rows(net, maps, leaf, a_con, b_con);

        // Variables (x, t); maximize t with z_n >= t on every merged-One
        // neuron, so a positive optimum certifies a strict interior witness.
        const int rows = static_cast<int>(a_con.rows()) +
                         static_cast<int>(one_ordinals.size());
        Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(rows, n + 1);
        Eigen::VectorXd b2(rows);
        a2.topLeftCorner(a_con.rows(), n) = a_con;
        b2.head(a_con.rows()) = b_con;
        int r = static_cast<int>(a_con.rows());
        for (int ord : one_ordinals) {
            int layer = 0, idx = ord;
            while (idx >= static_cast<int>(maps.A[layer].rows())) {
                idx -= static_cast<int>(maps.A[layer].rows());
                ++layer;
            }
            a2.row(r).head(n) = -maps.A[layer].row(idx);
            a2(r, n) = 1.0;
            b2[r] = maps.c[layer][idx];
            ++r;
        }

        Eigen::VectorXd obj = Eigen::VectorXd::Zero(n + 1);
        obj[n] = -1.0;
        Eigen::VectorXd lo(n + 1), hi(n + 1);
        lo.head(n) = domain.lower;
        hi.head(n) = domain.upper;
        lo[n] = 0.0;
        double tmax = 0.0;
        if (!one_ordinals.empty()) {
            const NeuronBounds nb = bounds_for_states(net, domain, merged);
            for (int ord : one_ordinals) {
                int layer = 0, idx = ord;
                while (idx >= static_cast<int>(nb.upper[layer].size())) {
                    idx -= static_cast<int>(nb.upper[layer].size());
                    ++layer;
                }
                tmax = std::max(tmax, nb.upper[layer][idx]);
            }
        }
        hi[n] = tmax;

        const LpResult lp = solve_box_lp(obj, a2, b2, lo, hi, opts.lp_pivot_budget);
        if (lp.status != LpStatus::Optimal) continue;
        const double t = lp.x[n];
        if (!one_ordinals.empty() && t <= 1e-7) continue;
        const Eigen::VectorXd x = clamp_to_box(lp.x.head(n), domain);
        if (exhibits(net, x, p1) && exhibits(net, x, p2)) {
            result.disjoint = false;
            result.witness = x;
            return result;
        }
    }
    result.disjoint = true;
    return result;
}

}  // namespace napmin
