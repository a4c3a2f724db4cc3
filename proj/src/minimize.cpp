#include "napmin/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

namespace napmin {

using nlohmann::json;

std::string terminated_by_name(TerminatedBy t) {
    switch (t) {
        case TerminatedBy::Minimal: return "Minimal";
        case TerminatedBy::SizeTarget: return "SizeTarget";
        case TerminatedBy::Budget: return "Budget";
        default: return "RefinedFails";
    }
}

std::string report_to_json(const MinimizeReport& report) {
    json doc;
    if (report.result) {
        doc["result"] = report.result->to_string();
        doc["result_size"] = report.result->size();
    } else {
        doc["result"] = nullptr;
    }
    doc["oracle_calls"] = report.oracle_calls;
    doc["terminated_by"] = terminated_by_name(report.terminated_by);
    doc["final_pass"] = report.final_pass;
    doc["trace"] = json::array();
    for (const TraceEntry& e : report.trace) {
        json je;
        je["nap"] = e.nap;
        je["size"] = e.size;
        je["verdict"] = outcome_name(e.verdict);
        if (e.theta >= 0.0)
            je["theta"] = e.theta;
        else
            je["theta"] = nullptr;
        doc["trace"].push_back(std::move(je));
    }
    return doc.dump(2);
}

namespace {

void log_call(MinimizeReport& report, const Nap& p, Outcome v, double theta = -1.0) {
    report.trace.push_back({p.to_string(), p.size(), v, theta});
    ++report.oracle_calls;
}

}  // namespace

MinimizeReport coarsen(const Nap& ref, Oracle& oracle, const std::vector<int>& order) {
    if (ref.signature() != oracle.signature())
        throw std::runtime_error("coarsen: NAP signature does not match oracle");
    std::vector<int> visit = order;
    if (visit.empty()) {
        visit.resize(ref.neuron_count());
        std::iota(visit.begin(), visit.end(), 0);
    }
    if (static_cast<int>(visit.size()) != ref.neuron_count())
        throw std::runtime_error("coarsen: order must cover every hidden neuron");
    for (int n : visit)
        if (n < 0 || n >= ref.neuron_count())
            throw std::runtime_error("coarsen: order entry out of range");

    MinimizeReport report;
    const Outcome first = oracle.query(ref).outcome;
    log_call(report, ref, first);
    if (first != Outcome::Pass) {
        report.terminated_by = TerminatedBy::RefinedFails;
        return report;
    }

    Nap p = ref;
    for (int n : visit) {
        const Nap candidate = coarsen_neuron(p, n);
        const Outcome v = oracle.query(candidate).outcome;
        log_call(report, candidate, v);
        if (v == Outcome::Pass) p = candidate;
    }
    report.result = p;
    report.final_pass = true;
    report.terminated_by = TerminatedBy::Minimal;
    return report;
}

Nap sample_nap(const std::vector<int>& candidates, double theta, Rng& rng, const Nap& ref,
               const Nap& base) {
    if (ref.signature() != base.signature())
        throw std::runtime_error("sample_nap: signature mismatch");
    Nap out = base;
    for (int n : candidates)
        out.set_state(n, rng.bernoulli(theta) ? ref.state(n) : ActivationState::Star);
    return out;
}

double sigmoid(double lambda) { return 1.0 / (1.0 + std::exp(-lambda)); }

double update_theta(double lambda, int verdict, double eta) {
    constexpr double kInvE = 0.36787944117144233;
    return lambda - eta * (static_cast<double>(verdict) - kInvE);
}

MinimizeReport stoch_coarsen(const Nap& ref, Oracle& oracle, const StochConfig& cfg) {
    if (ref.signature() != oracle.signature())
        throw std::runtime_error("stoch_coarsen: NAP signature does not match oracle");

    MinimizeReport report;
    report.terminated_by = TerminatedBy::Budget;
    if (cfg.max_calls == 0) return report;

    const bool fixed_mode = cfg.target_size.has_value();
    double lambda = cfg.lambda0;
    double theta;
    if (fixed_mode) {
        theta = cfg.theta0 ? *cfg.theta0 : std::exp(-1.0 / *cfg.target_size);
    } else {
        if (cfg.theta0) {
            const double t0 = *cfg.theta0;
            if (!(t0 > 0.0 && t0 < 1.0))
                throw std::runtime_error("stoch_coarsen: theta0 must lie in (0,1)");
            lambda = std::log(t0 / (1.0 - t0));
        }
        theta = sigmoid(lambda);
    }

    const Outcome first = oracle.query(ref).outcome;
    log_call(report, ref, first, theta);
    if (first != Outcome::Pass) {
        report.terminated_by = TerminatedBy::RefinedFails;
        return report;
    }

    Rng rng(cfg.seed);
    Nap p = ref;  // last passing NAP; Star outside the candidate set after a pass
    std::vector<int> candidates(ref.neuron_count());
    std::iota(candidates.begin(), candidates.end(), 0);
    int stable_passes = 0;
    bool converged = false;

    if (fixed_mode && p.size() <= *cfg.target_size) {
        report.result = p;
        report.final_pass = true;
        report.terminated_by = TerminatedBy::SizeTarget;
        return report;
    }

    while (!converged) {
        if (report.oracle_calls >= cfg.max_calls) {
            report.result = p;
            report.final_pass = true;
            report.terminated_by = TerminatedBy::Budget;
            return report;
        }
        const Nap sample = sample_nap(candidates, theta, rng, ref, p);
        const Outcome v = oracle.query(sample).outcome;
        log_call(report, sample, v, theta);
        if (!fixed_mode) {
            lambda = update_theta(lambda, v == Outcome::Pass ? 1 : 0, cfg.eta);
            theta = sigmoid(lambda);
        }
        if (v == Outcome::Pass) {
            std::vector<int> shrunk = sample.refined_ordinals();
            if (!fixed_mode) {
                if (shrunk == candidates)
                    ++stable_passes;
                else
                    stable_passes = 1;
                if (stable_passes >= 3) converged = true;
            }
            candidates = std::move(shrunk);
            p = sample;
            if (fixed_mode && p.size() <= *cfg.target_size) {
                report.result = p;
                report.final_pass = true;
                report.terminated_by = TerminatedBy::SizeTarget;
                return report;
            }
        } else if (!fixed_mode) {
            stable_passes = 0;
        }
    }

    // Convergence in adaptive mode: certify minimality with one deterministic
    // single-neuron pass over the surviving candidates.
    for (int n : p.refined_ordinals()) {
        if (report.oracle_calls >= cfg.max_calls) {
            report.result = p;
            report.final_pass = true;
            report.terminated_by = TerminatedBy::Budget;
            return report;
        }
        const Nap candidate = coarsen_neuron(p, n);
        const Outcome v = oracle.query(candidate).outcome;
        log_call(report, candidate, v, theta);
        if (v == Outcome::Pass) p = candidate;
    }
    report.result = p;
    report.final_pass = true;
    report.terminated_by = TerminatedBy::Minimal;
    return report;
}

MinimizeReport refine_search(Oracle& oracle, const std::vector<int>& signature,
                             const Nap& ref, bool allow_large) {
    if (ref.signature() != signature || oracle.signature() != signature)
        throw std::runtime_error("refine_search: signature mismatch");
    const int total = std::accumulate(signature.begin(), signature.end(), 0);
    if (total > 20 && !allow_large)
        throw std::runtime_error(
            "refine_search: more than 20 hidden neurons; pass the override to proceed");

    MinimizeReport report;
    const Outcome first = oracle.query(ref).outcome;
    log_call(report, ref, first);
    if (first != Outcome::Pass) {
        report.terminated_by = TerminatedBy::RefinedFails;
        return report;
    }

    const std::vector<int> refined = ref.refined_ordinals();
    const int m = static_cast<int>(refined.size());
    for (int k = 0; k < m; ++k) {
        // Size-k subsets of the refined neurons in lexicographic order.
        std::vector<int> pick(k);
        std::iota(pick.begin(), pick.end(), 0);
        for (;;) {
            std::vector<int> ords;
            ords.reserve(k);
            for (int i : pick) ords.push_back(refined[i]);
            const Nap candidate = restrict_to(ref, ords);
            const Outcome v = oracle.query(candidate).outcome;
            log_call(report, candidate, v);
            if (v == Outcome::Pass) {
                report.result = candidate;
                report.final_pass = true;
                report.terminated_by = TerminatedBy::Minimal;
                return report;
            }
            int i = k - 1;
            while (i >= 0 && pick[i] == m - k + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    // Nothing strictly smaller passes; ref itself is the minimum.
    report.result = ref;
    report.final_pass = true;
    report.terminated_by = TerminatedBy::Minimal;
    return report;
}

MinimizeReport sample_refine(Oracle& oracle, const Nap& ref, const SampleRefineConfig& cfg) {
    if (ref.signature() != oracle.signature())
        throw std::runtime_error("sample_refine: NAP signature does not match oracle");
    if (cfg.k < 1) throw std::runtime_error("sample_refine: k must be at least 1");
    if (static_cast<std::uint64_t>(cfg.k) * static_cast<std::uint64_t>(cfg.s) >
        cfg.max_calls)
        throw std::runtime_error("sample_refine: k*s exceeds the oracle call budget");
    const double theta =
        cfg.theta > 0.0 ? cfg.theta
                        : std::pow(cfg.s / (cfg.s + 1.0), static_cast<double>(cfg.s));

    MinimizeReport report;
    Rng rng(cfg.seed);
    const Nap coarse = Nap::coarsest(ref.signature());

    std::vector<int> visited;
    for (int n : cfg.seed_set) {
        if (n < 0 || n >= ref.neuron_count())
            throw std::runtime_error("sample_refine: seed set neuron out of range");
        if (ref.state(n) != ActivationState::Star) visited.push_back(n);
    }
    std::sort(visited.begin(), visited.end());
    visited.erase(std::unique(visited.begin(), visited.end()), visited.end());

    const std::vector<int> refined = ref.refined_ordinals();
    for (;;) {
        const Nap current = restrict_to(ref, visited);
        if (report.oracle_calls >= cfg.max_calls) {
            report.terminated_by = TerminatedBy::Budget;
            return report;
        }
        const Outcome v = oracle.query(current).outcome;
        log_call(report, current, v, theta);
        if (v == Outcome::Pass) {
            report.result = current;
            report.final_pass = true;
            report.terminated_by = TerminatedBy::Minimal;
            return report;
        }
        std::vector<int> unvisited;
        for (int n : refined)
            if (!std::binary_search(visited.begin(), visited.end(), n))
                unvisited.push_back(n);
        if (static_cast<int>(visited.size()) >= cfg.s || unvisited.empty()) {
            report.result = current;
            report.final_pass = false;
            report.terminated_by = TerminatedBy::SizeTarget;
            return report;
        }

        // Count appearances in passing samples; visited neurons stay Star.
        std::vector<std::uint64_t> counts(unvisited.size(), 0);
        for (int j = 0; j < cfg.k; ++j) {
            if (report.oracle_calls >= cfg.max_calls) {
                report.terminated_by = TerminatedBy::Budget;
                return report;
            }
            const Nap sample = sample_nap(unvisited, theta, rng, ref, coarse);
            const Outcome sv = oracle.query(sample).outcome;
            log_call(report, sample, sv, theta);
            if (sv == Outcome::Pass) {
                for (size_t i = 0; i < unvisited.size(); ++i)
                    if (sample.state(unvisited[i]) != ActivationState::Star) ++counts[i];
            }
        }
        size_t best = 0;
        for (size_t i = 1; i < unvisited.size(); ++i)
            if (counts[i] > counts[best]) best = i;  // ties keep the lowest ordinal
        visited.insert(
            std::lower_bound(visited.begin(), visited.end(), unvisited[best]),
            unvisited[best]);
    }
}

}  // namespace napmin
