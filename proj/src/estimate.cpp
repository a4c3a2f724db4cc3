#include "napmin/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <json.hpp>
#include <stdexcept>

#include "napmin/rng.hpp"

namespace napmin {

using nlohmann::json;

bool NeuronSet::contains(int ordinal) const {
    for (const FlaggedNeuron& f : neurons)
        if (f.ordinal == ordinal) return true;
    return false;
}

std::string neuron_set_to_json(const NeuronSet& set) {
    json doc = json::array();
    for (const FlaggedNeuron& f : set.neurons) {
        json je;
        je["layer"] = f.id.layer;
        je["index"] = f.id.index;
        je["witness"] = std::vector<double>(f.witness.data(), f.witness.data() + f.witness.size());
        je["rule"] = f.rule;
        doc.push_back(std::move(je));
    }
    return doc.dump(2);
}

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
    Eigen::VectorXd out = v;
    for (int i = 0; i < out.size(); ++i)
        out[i] = std::min(hi[i], std::max(lo[i], out[i]));
    return out;
}

// Single PGD run from a given start point.
std::optional<Eigen::VectorXd> pgd_single(const Network& net, const Eigen::VectorXd& start,
                                          int c, const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi, double alpha,
                                          int iterations) {
    Eigen::VectorXd x = project(start, lo, hi);
    if (margin(net, x, c) <= 0.0) return x;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd g = grad_margin_wrt_input(net, x, c);
        Eigen::VectorXd step(x.size());
        for (int i = 0; i < x.size(); ++i)
            step[i] = g[i] > 0.0 ? -alpha : (g[i] < 0.0 ? alpha : 0.0);
        x = project(x + step, lo, hi);
        if (margin(net, x, c) <= 0.0) return x;
    }
    return std::nullopt;
}

struct BallBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

BallBox attack_box(const Eigen::VectorXd& x, double eps, const InputDomain& domain) {
    BallBox b;
    b.lo = domain.lower.cwiseMax((x.array() - eps).matrix());
    b.hi = domain.upper.cwiseMin((x.array() + eps).matrix());
    return b;
}

}  // namespace

std::optional<Eigen::VectorXd> pgd_attack(const Network& net, const Eigen::VectorXd& x,
                                          int c, const InputDomain& domain,
                                          const AttackConfig& cfg) {
    if (margin(net, x, c) <= 0.0)
        throw std::runtime_error("pgd_attack: input is not correctly classified");
    if (cfg.eps <= 0.0) return std::nullopt;
    const double alpha = cfg.alpha > 0.0 ? cfg.alpha : cfg.eps / 10.0;
    const BallBox box = attack_box(x, cfg.eps, domain);
    Rng rng(cfg.seed);
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Eigen::VectorXd start = x;
        if (r > 0) {
            Rng sub = rng.split(static_cast<std::uint64_t>(r));
            for (int i = 0; i < start.size(); ++i)
                start[i] = sub.uniform(box.lo[i], box.hi[i]);
        }
        const auto hit = pgd_single(net, start, c, box.lo, box.hi, alpha, cfg.iterations);
        if (hit) return hit;
    }
    return std::nullopt;
}

std::vector<int> xor_flagged_ordinals(const Nap& ref, const Nap& binary) {
    if (ref.signature() != binary.signature())
        throw std::runtime_error("xor_flagged_ordinals: signature mismatch");
    std::vector<int> out;
    for (int i = 0; i < ref.neuron_count(); ++i) {
        if (ref.state(i) == ActivationState::Star) continue;
        if (ref.state(i) != binary.state(i)) out.push_back(i);
    }
    return out;
}

NeuronSet opt_adv_prune(const Network& net, const Eigen::MatrixXd& rows, int c,
                        const Nap& ref, const InputDomain& domain,
                        const AttackConfig& cfg) {
    if (ref.signature() != net.signature())
        throw std::runtime_error("opt_adv_prune: NAP signature does not match network");
    const double alpha = cfg.alpha > 0.0 ? cfg.alpha : cfg.eps / 10.0;
    std::map<int, Eigen::VectorXd> flagged;  // ordinal -> first witness
    Rng rng(cfg.seed);
    const int restarts = std::max(1, cfg.restarts);
    for (int r = 0; r < rows.rows(); ++r) {
        const Eigen::VectorXd x = rows.row(r).transpose();
        if (margin(net, x, c) <= 0.0) continue;  // skip misclassified rows
        if (cfg.eps <= 0.0) continue;
        const BallBox box = attack_box(x, cfg.eps, domain);
        for (int rep = 0; rep < restarts; ++rep) {
            Eigen::VectorXd start = x;
            if (rep > 0) {
                Rng sub = rng.split(static_cast<std::uint64_t>(r) * restarts + rep);
                for (int i = 0; i < start.size(); ++i)
                    start[i] = sub.uniform(box.lo[i], box.hi[i]);
            }
            const auto hit =
                pgd_single(net, start, c, box.lo, box.hi, alpha, cfg.iterations);
            if (!hit) continue;
            const Nap binary = abstract_binary(net, *hit);
            for (int ord : xor_flagged_ordinals(ref, binary))
                flagged.emplace(ord, *hit);  // keep the first witness per neuron
        }
    }
    NeuronSet out;
    for (const auto& [ord, witness] : flagged)
        out.neurons.push_back({neuron_from_ordinal(ref.signature(), ord), ord, witness,
                               "adv_xor"});
    return out;
}

NeuronSet gradient_search(const Network& net, const Eigen::MatrixXd& rows, int c,
                          const Nap& ref, const GradientSearchConfig& cfg) {
    if (ref.signature() != net.signature())
        throw std::runtime_error("gradient_search: NAP signature does not match network");
    if (rows.rows() == 0) return {};

    const int total = net.hidden_count();
    std::vector<double> margins(rows.rows());
    std::vector<std::vector<double>> grads(rows.rows());
    std::vector<std::vector<double>> zhat(rows.rows());
    for (int r = 0; r < rows.rows(); ++r) {
        const Eigen::VectorXd x = rows.row(r).transpose();
        margins[r] = margin(net, x, c);
        grads[r].resize(total);
        zhat[r].resize(total);
        const ActivationTrace trace = forward(net, x);
        int ordinal = 0;
        for (int l = 1; l < net.depth(); ++l) {
            for (int i = 0; i < net.hidden_width(l); ++i, ++ordinal) {
                zhat[r][ordinal] = trace.post[l - 1][i];
                grads[r][ordinal] = grad_margin_wrt_hidden(net, x, c, NeuronId{l, i});
            }
        }
    }

    double beta = cfg.beta;
    double gamma = cfg.gamma;
    if (beta <= 0.0) {
        std::vector<double> mags;
        mags.reserve(margins.size());
        for (double m : margins) mags.push_back(std::abs(m));
        std::sort(mags.begin(), mags.end());
        beta = 0.1 * mags[(mags.size() - 1) / 2];
    }
    if (gamma <= 0.0) {
        std::vector<double> mags;
        mags.reserve(static_cast<size_t>(rows.rows()) * total);
        for (const auto& g : grads)
            for (double v : g) mags.push_back(std::abs(v));
        std::sort(mags.begin(), mags.end());
        gamma = mags[(mags.size() - 1) / 2];
    }

    std::map<int, std::pair<Eigen::VectorXd, std::string>> flagged;
    for (int r = 0; r < rows.rows(); ++r) {
        for (int ord = 0; ord < total; ++ord) {
            const ActivationState state = ref.state(ord);
            if (zhat[r][ord] > 0.0) {
                // Active at the sample but pinned to Zero: coarsening would
                // admit this point, and it sits near the boundary with a steep
                // output sensitivity.
                if (state == ActivationState::Zero && std::abs(margins[r]) < beta &&
                    std::abs(grads[r][ord]) > gamma)
                    flagged.emplace(ord, std::make_pair(rows.row(r).transpose(),
                                                        std::string("state0_boundary")));
            } else {
                if (state == ActivationState::One && margins[r] < 0.0)
                    flagged.emplace(ord,
                                    std::make_pair(rows.row(r).transpose(),
                                                   std::string("state1_misclassified")));
            }
        }
    }

    NeuronSet out;
    for (const auto& [ord, payload] : flagged)
        out.neurons.push_back({neuron_from_ordinal(ref.signature(), ord), ord,
                               payload.first, payload.second});
    return out;
}

}  // namespace napmin
