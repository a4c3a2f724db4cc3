#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "napmin/nap.hpp"
#include "napmin/network.hpp"

namespace napmin {

struct AttackConfig {
    double eps = 0.1;
    double alpha = 0.0;  // step size; nonpositive means eps / 10
    int iterations = 40;
    int restarts = 5;
    std::uint64_t seed = 0;
};

struct GradientSearchConfig {
    double beta = 0.0;   // margin-magnitude threshold; nonpositive -> data-derived
    double gamma = 0.0;  // gradient-magnitude threshold; nonpositive -> data-derived
};

struct FlaggedNeuron {
    NeuronId id;
    int ordinal = 0;
    Eigen::VectorXd witness;
    std::string rule;
};

struct NeuronSet {
    std::vector<FlaggedNeuron> neurons;  // sorted by ordinal, one witness each
    bool contains(int ordinal) const;
};

std::string neuron_set_to_json(const NeuronSet& set);

// Sign-gradient descent on the margin with projection onto ball-and-domain.
// Restart 0 starts at x, later restarts at uniform points of the feasible box.
// Returns the first iterate with margin <= 0, if any.
std::optional<Eigen::VectorXd> pgd_attack(const Network& net, const Eigen::VectorXd& x,
                                          int c, const InputDomain& domain,
                                          const AttackConfig& cfg);

// Ordinals where ref is refined and the binary pattern disagrees (the XOR
// flagging rule applied to one adversarial example).
std::vector<int> xor_flagged_ordinals(const Nap& ref, const Nap& binary);

// One attack per (row, restart); every successful adversarial example flags
// the neurons whose binary state differs from ref's refined state.
NeuronSet opt_adv_prune(const Network& net, const Eigen::MatrixXd& rows, int c,
                        const Nap& ref, const InputDomain& domain,
                        const AttackConfig& cfg);

NeuronSet gradient_search(const Network& net, const Eigen::MatrixXd& rows, int c,
                          const Nap& ref, const GradientSearchConfig& cfg);

}  // namespace napmin
