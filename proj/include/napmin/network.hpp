#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace napmin {

struct Layer {
    Eigen::MatrixXd weights;  // rows = this layer's width, cols = previous width
    Eigen::VectorXd bias;
};

// Feed-forward ReLU network: hidden layers 1..L-1 are ReLU, layer L is affine.
struct Network {
    int input_dim = 0;
    std::vector<Layer> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    int output_dim() const { return static_cast<int>(layers.back().bias.size()); }
    int hidden_layers() const { return depth() - 1; }
    int hidden_width(int layer) const {  // layer in [1, L-1]
        return static_cast<int>(layers[layer - 1].bias.size());
    }
    int hidden_count() const {
        int total = 0;
        for (int l = 1; l < depth(); ++l) total += hidden_width(l);
        return total;
    }
    std::vector<int> signature() const {
        std::vector<int> sig;
        for (int l = 1; l < depth(); ++l) sig.push_back(hidden_width(l));
        return sig;
    }
};

struct NeuronId {
    int layer = 1;  // 1-based hidden layer
    int index = 0;  // 0-based within the layer

    friend bool operator==(const NeuronId&, const NeuronId&) = default;
};

// Flat position of a hidden neuron in the fixed layer-major, index-minor order.
int neuron_ordinal(const Network& net, const NeuronId& n);
int neuron_ordinal(const std::vector<int>& signature, const NeuronId& n);
NeuronId neuron_from_ordinal(const std::vector<int>& signature, int ordinal);

struct ActivationTrace {
    std::vector<Eigen::VectorXd> pre;   // z per hidden layer
    std::vector<Eigen::VectorXd> post;  // zhat per hidden layer
    Eigen::VectorXd output;
};

struct InputDomain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static InputDomain unit_box(int dim);
    bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
};

struct Dataset {
    Eigen::MatrixXd xs;       // one row per sample
    std::vector<int> labels;

    int size() const { return static_cast<int>(labels.size()); }
};

Network load_model(const std::string& path);
void save_model(const Network& net, const std::string& path);
void validate_model(const Network& net);

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

ActivationTrace forward(const Network& net, const Eigen::VectorXd& x);

// F_c(x) - max_{k != c} F_k(x); for scalar-output nets, F(x) itself.
double margin(const Network& net, const Eigen::VectorXd& x, int c);
int predict(const Network& net, const Eigen::VectorXd& x);

// Chain-rule gradients through the active ReLU pattern at x (subgradient 0 at
// z = 0, matching the binary abstraction of an inactive neuron).
Eigen::VectorXd grad_margin_wrt_input(const Network& net, const Eigen::VectorXd& x, int c);
double grad_margin_wrt_hidden(const Network& net, const Eigen::VectorXd& x, int c,
                              const NeuronId& n);

// Forward pass that overrides the post-activation of one hidden neuron; used
// by the finite-difference checks and by margin sensitivities.
double margin_with_hidden_override(const Network& net, const Eigen::VectorXd& x, int c,
                                   const NeuronId& n, double zhat_value);

}  // namespace napmin
