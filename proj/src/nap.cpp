#include "napmin/nap.hpp"

#include <fstream>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

namespace napmin {

using nlohmann::json;

bool state_leq(ActivationState coarse, ActivationState fine) {
    return coarse == fine || coarse == ActivationState::Star;
}

Nap::Nap(std::vector<int> signature, std::vector<ActivationState> states)
    : signature_(std::move(signature)), states_(std::move(states)) {
    const int total = std::accumulate(signature_.begin(), signature_.end(), 0);
    if (total != static_cast<int>(states_.size()))
        throw std::runtime_error("NAP state count does not match signature");
}

Nap Nap::coarsest(std::vector<int> signature) {
    const int total = std::accumulate(signature.begin(), signature.end(), 0);
    return Nap(std::move(signature),
               std::vector<ActivationState>(total, ActivationState::Star));
}

Nap Nap::parse(const std::vector<int>& signature, const std::string& states) {
    std::vector<ActivationState> parsed;
    parsed.reserve(states.size());
    for (char c : states) {
        switch (c) {
            case '0': parsed.push_back(ActivationState::Zero); break;
            case '1': parsed.push_back(ActivationState::One); break;
            case '*': parsed.push_back(ActivationState::Star); break;
            default: throw std::runtime_error(std::string("invalid NAP state character: ") + c);
        }
    }
    return Nap(signature, std::move(parsed));
}

ActivationState Nap::state(const NeuronId& n) const {
    return states_[neuron_ordinal(signature_, n)];
}

int Nap::size() const {
    int count = 0;
    for (ActivationState s : states_)
        if (s != ActivationState::Star) ++count;
    return count;
}

std::string Nap::to_string() const {
    std::string out;
    out.reserve(states_.size());
    for (ActivationState s : states_) out.push_back(static_cast<char>(s));
    return out;
}

std::vector<int> Nap::refined_ordinals() const {
    std::vector<int> out;
    for (int i = 0; i < neuron_count(); ++i)
        if (states_[i] != ActivationState::Star) out.push_back(i);
    return out;
}

bool subsumes(const Nap& coarse, const Nap& fine) {
    if (coarse.signature() != fine.signature())
        throw std::runtime_error("NAP signature mismatch");
    for (int i = 0; i < coarse.neuron_count(); ++i)
        if (!state_leq(coarse.state(i), fine.state(i))) return false;
    return true;
}

Nap coarsen_neuron(const Nap& p, int ordinal) {
    Nap out = p;
    out.set_state(ordinal, ActivationState::Star);
    return out;
}

Nap coarsen_neuron(const Nap& p, const NeuronId& n) {
    return coarsen_neuron(p, neuron_ordinal(p.signature(), n));
}

Nap refine_neuron(const Nap& p, int ordinal, const Nap& ref) {
    if (p.signature() != ref.signature())
        throw std::runtime_error("NAP signature mismatch");
    Nap out = p;
    out.set_state(ordinal, ref.state(ordinal));
    return out;
}

Nap refine_neuron(const Nap& p, const NeuronId& n, const Nap& ref) {
    return refine_neuron(p, neuron_ordinal(p.signature(), n), ref);
}

Nap restrict_to(const Nap& ref, const std::vector<int>& ordinals) {
    Nap out = Nap::coarsest(ref.signature());
    for (int i : ordinals) out.set_state(i, ref.state(i));
    return out;
}

Nap abstract_unary(const std::vector<int>& signature) {
    return Nap::coarsest(signature);
}

Nap abstract_binary(const Network& net, const Eigen::VectorXd& x) {
    const ActivationTrace trace = forward(net, x);
    std::vector<ActivationState> states;
    states.reserve(net.hidden_count());
    for (const Eigen::VectorXd& zhat : trace.post)
        for (int i = 0; i < zhat.size(); ++i)
            states.push_back(zhat[i] > 0.0 ? ActivationState::One : ActivationState::Zero);
    return Nap(net.signature(), std::move(states));
}

Nap abstract_statistical(const Network& net, const Eigen::MatrixXd& rows,
                         const AbstractionConfig& cfg) {
    if (rows.rows() == 0) throw std::runtime_error("abstract_statistical: empty input set");
    if (!(cfg.delta > 0.5 && cfg.delta <= 1.0))
        throw std::runtime_error("delta must lie in (0.5, 1]");
    const int total = net.hidden_count();
    std::vector<int> active(total, 0);
    for (int r = 0; r < rows.rows(); ++r) {
        const ActivationTrace trace = forward(net, rows.row(r).transpose());
        int pos = 0;
        for (const Eigen::VectorXd& zhat : trace.post)
            for (int i = 0; i < zhat.size(); ++i, ++pos)
                if (zhat[i] > 0.0) ++active[pos];
    }
    const double n = static_cast<double>(rows.rows());
    std::vector<ActivationState> states(total, ActivationState::Star);
    for (int i = 0; i < total; ++i) {
        const double frac_one = active[i] / n;
        const double frac_zero = 1.0 - frac_one;
        if (frac_zero >= cfg.delta)
            states[i] = ActivationState::Zero;
        else if (frac_one >= cfg.delta)
            states[i] = ActivationState::One;
    }
    return Nap(net.signature(), std::move(states));
}

Nap class_nap(const Network& net, const Dataset& data, int c, const AbstractionConfig& cfg) {
    int count = 0;
    for (int label : data.labels)
        if (label == c) ++count;
    if (count == 0)
        throw std::runtime_error("dataset has no rows of class " + std::to_string(c));
    Eigen::MatrixXd rows(count, data.xs.cols());
    int at = 0;
    for (int r = 0; r < data.size(); ++r)
        if (data.labels[r] == c) rows.row(at++) = data.xs.row(r);
    return abstract_statistical(net, rows, cfg);
}

bool exhibits(const Network& net, const Eigen::VectorXd& x, const Nap& p) {
    return subsumes(p, abstract_binary(net, x));
}

Nap load_nap(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open NAP file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("NAP parse failure in " + path + ": " + e.what());
    }
    try {
        const std::vector<int> signature = doc.at("signature").get<std::vector<int>>();
        return Nap::parse(signature, doc.at("states").get<std::string>());
    } catch (const json::exception& e) {
        throw std::runtime_error("NAP schema error in " + path + ": " + e.what());
    }
}

std::string nap_to_json(const Nap& p) {
    json doc;
    doc["signature"] = p.signature();
    doc["states"] = p.to_string();
    return doc.dump(2);
}

void save_nap(const Nap& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write NAP file: " + path);
    out << nap_to_json(p) << "\n";
}

}  // namespace napmin
