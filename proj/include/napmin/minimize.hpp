#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "napmin/nap.hpp"
#include "napmin/oracle.hpp"
#include "napmin/rng.hpp"

namespace napmin {

enum class TerminatedBy { Minimal, SizeTarget, Budget, RefinedFails };
std::string terminated_by_name(TerminatedBy t);

struct TraceEntry {
    std::string nap;
    int size = 0;
    Outcome verdict = Outcome::Fail;
    double theta = -1.0;  // sampling probability in effect; negative when n/a
};

struct MinimizeReport {
    std::optional<Nap> result;
    std::uint64_t oracle_calls = 0;
    std::vector<TraceEntry> trace;
    TerminatedBy terminated_by = TerminatedBy::RefinedFails;
    bool final_pass = false;
};

std::string report_to_json(const MinimizeReport& report);

// One pass over `order` (default: global neuron order), coarsening each neuron
// and refining it back when the oracle rejects. Exactly |N| + 1 oracle calls.
MinimizeReport coarsen(const Nap& ref, Oracle& oracle,
                       const std::vector<int>& order = {});

// Candidates independently take ref's state with probability theta, Star
// otherwise; every other neuron copies `base` (coarsest for Sample_Refine, the
// current NAP for StochCoarsen).
Nap sample_nap(const std::vector<int>& candidates, double theta, Rng& rng, const Nap& ref,
               const Nap& base);

double sigmoid(double lambda);
// lambda <- lambda - eta * (verdict - 1/e); verdict is 1 on Pass, 0 otherwise.
double update_theta(double lambda, int verdict, double eta);

struct StochConfig {
    std::optional<double> theta0;    // overrides the derived starting probability
    double lambda0 = 0.0;
    double eta = 0.1;
    std::optional<int> target_size;  // s; fixed theta = e^{-1/s} when present
    std::uint64_t max_calls = 10000;
    std::uint64_t seed = 0;
};

MinimizeReport stoch_coarsen(const Nap& ref, Oracle& oracle, const StochConfig& cfg);

// Size-ascending exhaustive search over the refined neurons of ref; the first
// passing NAP has globally minimum size. Refuses more than 20 hidden neurons
// unless allow_large is set.
MinimizeReport refine_search(Oracle& oracle, const std::vector<int>& signature,
                             const Nap& ref, bool allow_large = false);

struct SampleRefineConfig {
    double theta = -1.0;  // negative: use (s/(s+1))^s
    int k = 100;          // samples per iteration
    int s = 1;            // neurons to collect
    std::uint64_t seed = 0;
    std::vector<int> seed_set;  // pre-visited neuron ordinals
    std::uint64_t max_calls = 100000;
};

MinimizeReport sample_refine(Oracle& oracle, const Nap& ref, const SampleRefineConfig& cfg);

}  // namespace napmin
