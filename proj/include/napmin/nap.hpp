#pragma once

#include <string>
#include <vector>

#include "napmin/network.hpp"

namespace napmin {

// Abstraction state of one hidden neuron. The partial order puts Star below
// both binary states: Star ⪯ Zero, Star ⪯ One; Zero and One are incomparable.
enum class ActivationState : char { Zero = '0', One = '1', Star = '*' };

bool state_leq(ActivationState coarse, ActivationState fine);

struct AbstractionConfig {
    double delta = 0.99;  // must satisfy 0.5 < delta <= 1
};

class Nap {
public:
    Nap() = default;
    Nap(std::vector<int> signature, std::vector<ActivationState> states);

    static Nap coarsest(std::vector<int> signature);
    static Nap parse(const std::vector<int>& signature, const std::string& states);

    const std::vector<int>& signature() const { return signature_; }
    int neuron_count() const { return static_cast<int>(states_.size()); }
    ActivationState state(int ordinal) const { return states_[ordinal]; }
    ActivationState state(const NeuronId& n) const;
    void set_state(int ordinal, ActivationState s) { states_[ordinal] = s; }

    int size() const;  // number of non-Star states
    std::string to_string() const;
    std::vector<int> refined_ordinals() const;

    friend bool operator==(const Nap&, const Nap&) = default;

private:
    std::vector<int> signature_;
    std::vector<ActivationState> states_;
};

// P_coarse ≼ P_fine: every state of the first abstracts the second's.
bool subsumes(const Nap& coarse, const Nap& fine);

Nap coarsen_neuron(const Nap& p, const NeuronId& n);
Nap coarsen_neuron(const Nap& p, int ordinal);
Nap refine_neuron(const Nap& p, const NeuronId& n, const Nap& ref);
Nap refine_neuron(const Nap& p, int ordinal, const Nap& ref);

// ref restricted to the given ordinals; everything else Star.
Nap restrict_to(const Nap& ref, const std::vector<int>& ordinals);

Nap abstract_unary(const std::vector<int>& signature);  // alias for coarsest
Nap abstract_binary(const Network& net, const Eigen::VectorXd& x);
Nap abstract_statistical(const Network& net, const Eigen::MatrixXd& rows,
                         const AbstractionConfig& cfg);
Nap class_nap(const Network& net, const Dataset& data, int c, const AbstractionConfig& cfg);

bool exhibits(const Network& net, const Eigen::VectorXd& x, const Nap& p);

Nap load_nap(const std::string& path);
void save_nap(const Nap& p, const std::string& path);
std::string nap_to_json(const Nap& p);

}  // namespace napmin
