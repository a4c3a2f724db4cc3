#include "napmin/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

namespace napmin {

using nlohmann::json;

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "pass";
        case Outcome::Fail: return "fail";
        default: return "unknown";
    }
}

SyntheticOracle::SyntheticOracle(std::vector<int> signature,
                                 std::vector<std::vector<int>> clauses)
    : signature_(std::move(signature)), clauses_(std::move(clauses)) {
    neuron_count_ = std::accumulate(signature_.begin(), signature_.end(), 0);
    for (auto& clause : clauses_) {
        std::sort(clause.begin(), clause.end());
        clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
        for (int n : clause)
            if (n < 0 || n >= neuron_count_)
                throw std::runtime_error("synthetic oracle clause neuron out of range");
    }
    std::sort(clauses_.begin(), clauses_.end());
}

OracleVerdict SyntheticOracle::query(const Nap& p) {
    if (p.signature() != signature_)
        throw std::runtime_error("synthetic oracle signature mismatch");
    for (const auto& clause : clauses_) {
        bool all = true;
        for (int n : clause) {
            if (p.state(n) == ActivationState::Star) {
                all = false;
                break;
            }
        }
        if (all) return {Outcome::Pass, std::nullopt};
    }
    return {Outcome::Fail, std::nullopt};
}

SyntheticOracle SyntheticOracle::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open oracle file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("oracle parse failure in " + path + ": " + e.what());
    }
    try {
        return SyntheticOracle(doc.at("signature").get<std::vector<int>>(),
                               doc.at("clauses").get<std::vector<std::vector<int>>>());
    } catch (const json::exception& e) {
        throw std::runtime_error("oracle schema error in " + path + ": " + e.what());
    }
}

void SyntheticOracle::save(const std::string& path) const {
    json doc;
    doc["signature"] = signature_;
    doc["clauses"] = clauses_;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write oracle file: " + path);
    out << doc.dump(2) << "\n";
}

VerifierOracle::VerifierOracle(const Network& net, RobustnessQuery query, VerifyOptions opts)
    : net_(net), query_(std::move(query)), opts_(opts), signature_(net.signature()) {}

OracleVerdict VerifierOracle::query(const Nap& p) {
    last_ = verify(net_, p, query_, opts_);
    OracleVerdict v;
    switch (last_.verdict) {
        case Verdict::Verified:
            v.outcome = Outcome::Pass;
            break;
        case Verdict::Falsified:
            v.outcome = Outcome::Fail;
            v.counterexample = last_.counterexample;
            break;
        default:
            v.outcome = Outcome::Unknown;
            break;
    }
    return v;
}

std::unique_ptr<Oracle> oracle_from_verifier(const Network& net, const RobustnessQuery& query,
                                             const VerifyOptions& opts) {
    return std::make_unique<VerifierOracle>(net, query, opts);
}

}  // namespace napmin
