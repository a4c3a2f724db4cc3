#include "napmin/network.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace napmin {

using nlohmann::json;

int neuron_ordinal(const std::vector<int>& signature, const NeuronId& n) {
    if (n.layer < 1 || n.layer > static_cast<int>(signature.size()))
        throw std::runtime_error("neuron layer out of range");
    if (n.index < 0 || n.index >= signature[n.layer - 1])
        throw std::runtime_error("neuron index out of range");
    int pos = 0;
    for (int l = 1; l < n.layer; ++l) pos += signature[l - 1];
    return pos + n.index;
}

int neuron_ordinal(const Network& net, const NeuronId& n) {
    return neuron_ordinal(net.signature(), n);
}

NeuronId neuron_from_ordinal(const std::vector<int>& signature, int ordinal) {
    int pos = ordinal;
    for (int l = 1; l <= static_cast<int>(signature.size()); ++l) {
        if (pos < signature[l - 1]) return NeuronId{l, pos};
        pos -= signature[l - 1];
    }
    throw std::runtime_error("neuron ordinal out of range");
}

InputDomain InputDomain::unit_box(int dim) {
    InputDomain d;
    d.lower = Eigen::VectorXd::Zero(dim);
    d.upper = Eigen::VectorXd::Ones(dim);
    return d;
}

bool InputDomain::contains(const Eigen::VectorXd& x, double slack) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    }
    return true;
}

void validate_model(const Network& net) {
    if (net.depth() < 2) throw std::runtime_error("model must have at least 2 layers");
    if (net.input_dim < 1) throw std::runtime_error("input_dim must be positive");
    int prev = net.input_dim;
    for (int l = 0; l < net.depth(); ++l) {
        const Layer& layer = net.layers[l];
        if (layer.weights.cols() != prev)
            throw std::runtime_error("layer " + std::to_string(l + 1) +
                                     ": weight matrix has " + std::to_string(layer.weights.cols()) +
                                     " columns, expected " + std::to_string(prev));
        if (layer.weights.rows() != layer.bias.size())
            throw std::runtime_error("layer " + std::to_string(l + 1) +
                                     ": bias length does not match weight rows");
        if (!layer.weights.allFinite() || !layer.bias.allFinite())
            throw std::runtime_error("layer " + std::to_string(l + 1) + ": non-finite entry");
        prev = static_cast<int>(layer.weights.rows());
    }
}

Network load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("model parse failure in " + path + ": " + e.what());
    }
    Network net;
    try {
        net.input_dim = doc.at("input_dim").get<int>();
        for (const auto& jl : doc.at("layers")) {
            Layer layer;
            const auto& rows = jl.at("weights");
            const auto& bias = jl.at("bias");
            const int nrows = static_cast<int>(rows.size());
            const int ncols = nrows > 0 ? static_cast<int>(rows[0].size()) : 0;
            layer.weights.resize(nrows, ncols);
            for (int r = 0; r < nrows; ++r) {
                if (static_cast<int>(rows[r].size()) != ncols)
                    throw std::runtime_error("layer " + std::to_string(net.layers.size() + 1) +
                                             ": ragged weight rows");
                for (int c = 0; c < ncols; ++c) layer.weights(r, c) = rows[r][c].get<double>();
            }
            layer.bias.resize(static_cast<int>(bias.size()));
            for (int r = 0; r < static_cast<int>(bias.size()); ++r)
                layer.bias[r] = bias[r].get<double>();
            net.layers.push_back(std::move(layer));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("model schema error in " + path + ": " + e.what());
    }
    validate_model(net);
    return net;
}

void save_model(const Network& net, const std::string& path) {
    json doc;
    doc["input_dim"] = net.input_dim;
    doc["layers"] = json::array();
    for (const Layer& layer : net.layers) {
        json jl;
        jl["weights"] = json::array();
        for (int r = 0; r < layer.weights.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
            jl["weights"].push_back(std::move(row));
        }
        jl["bias"] = json::array();
        for (int r = 0; r < layer.bias.size(); ++r) jl["bias"].push_back(layer.bias[r]);
        doc["layers"].push_back(std::move(jl));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
}

ActivationTrace forward(const Network& net, const Eigen::VectorXd& x) {
    if (x.size() != net.input_dim) throw std::runtime_error("input length mismatch");
    ActivationTrace trace;
    Eigen::VectorXd cur = x;
    for (int l = 0; l < net.depth(); ++l) {
        Eigen::VectorXd z = net.layers[l].weights * cur + net.layers[l].bias;
        if (l + 1 < net.depth()) {
            trace.pre.push_back(z);
            trace.post.push_back(z.cwiseMax(0.0));
            cur = trace.post.back();
        } else {
            trace.output = z;
        }
    }
    return trace;
}

namespace {

// Rival class with the largest score, lowest index on ties.
int rival_class(const Eigen::VectorXd& out, int c) {
    int best = -1;
    for (int k = 0; k < out.size(); ++k) {
        if (k == c) continue;
        if (best < 0 || out[k] > out[best]) best = k;
    }
    return best;
}

}  // namespace

double margin(const Network& net, const Eigen::VectorXd& x, int c) {
    const int m = net.output_dim();
    if (m == 1) {
        if (c != 0) throw std::runtime_error("invalid class id for scalar output");
        return forward(net, x).output[0];
    }
    if (c < 0 || c >= m) throw std::runtime_error("invalid class id");
    const Eigen::VectorXd out = forward(net, x).output;
    return out[c] - out[rival_class(out, c)];
}

int predict(const Network& net, const Eigen::VectorXd& x) {
    const Eigen::VectorXd out = forward(net, x).output;
    if (out.size() == 1) return out[0] > 0.0 ? 0 : 1;
    int best = 0;
    for (int k = 1; k < out.size(); ++k)
        if (out[k] > out[best]) best = k;
    return best;
}

Eigen::VectorXd grad_margin_wrt_input(const Network& net, const Eigen::VectorXd& x, int c) {
    const int m = net.output_dim();
    if (m != 1 && (c < 0 || c >= m)) throw std::runtime_error("invalid class id");
    const ActivationTrace trace = forward(net, x);

    Eigen::VectorXd v;  // d margin / d zhat_{current layer}
    if (m == 1) {
        v = net.layers.back().weights.row(0).transpose();
    } else {
        const int k = rival_class(trace.output, c);
        v = (net.layers.back().weights.row(c) - net.layers.back().weights.row(k)).transpose();
    }
    for (int l = net.depth() - 1; l >= 1; --l) {
        // v indexes zhat of hidden layer l; mask through the ReLU, then the
        // affine map down to layer l-1 (or the input when l == 1).
        for (int i = 0; i < v.size(); ++i)
            if (trace.pre[l - 1][i] <= 0.0) v[i] = 0.0;
        v = net.layers[l - 1].weights.transpose() * v;
    }
    return v;
}

double grad_margin_wrt_hidden(const Network& net, const Eigen::VectorXd& x, int c,
                              const NeuronId& n) {
    const int m = net.output_dim();
    if (m != 1 && (c < 0 || c >= m)) throw std::runtime_error("invalid class id");
    if (n.layer < 1 || n.layer >= net.depth() || n.index < 0 ||
        n.index >= net.hidden_width(n.layer))
        throw std::runtime_error("invalid neuron id");
    const ActivationTrace trace = forward(net, x);

    Eigen::VectorXd v;
    if (m == 1) {
        v = net.layers.back().weights.row(0).transpose();
    } else {
        const int k = rival_class(trace.output, c);
        v = (net.layers.back().weights.row(c) - net.layers.back().weights.row(k)).transpose();
    }
    for (int l = net.depth() - 1; l > n.layer; --l) {
        for (int i = 0; i < v.size(); ++i)
            if (trace.pre[l - 1][i] <= 0.0) v[i] = 0.0;
        v = net.layers[l - 1].weights.transpose() * v;
    }
    return v[n.index];
}

double margin_with_hidden_override(const Network& net, const Eigen::VectorXd& x, int c,
                                   const NeuronId& n, double zhat_value) {
    if (x.size() != net.input_dim) throw std::runtime_error("input length mismatch");
    Eigen::VectorXd cur = x;
    Eigen::VectorXd out;
    for (int l = 0; l < net.depth(); ++l) {
        Eigen::VectorXd z = net.layers[l].weights * cur + net.layers[l].bias;
        if (l + 1 < net.depth()) {
            cur = z.cwiseMax(0.0);
            if (l + 1 == n.layer) cur[n.index] = zhat_value;
        } else {
            out = z;
        }
    }
    if (out.size() == 1) return out[0];
    return out[c] - out[rival_class(out, c)];
}

}  // namespace napmin
