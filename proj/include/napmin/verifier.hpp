#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "napmin/nap.hpp"
#include "napmin/network.hpp"
#include "napmin/simplex.hpp"

namespace napmin {

struct Ball {
    Eigen::VectorXd center;
    double eps = 0.0;
};

struct RobustnessQuery {
    int target_class = 0;
    InputDomain domain;
    std::optional<Ball> ball;
    double tau = 1e-6;
    std::uint64_t phase_budget = 1u << 20;
    std::int64_t time_budget_ms = 10000;
};

RobustnessQuery load_query(const std::string& path);
void save_query(const RobustnessQuery& q, const std::string& path);

// Phase of one hidden neuron once its ReLU is locked.
enum class Phase : std::uint8_t { Inactive = 0, Active = 1 };

struct PhaseAssignment {
    std::vector<Phase> phase;  // indexed by neuron ordinal, total assignment
};

enum class Verdict { Verified, Falsified, Unknown };
std::string verdict_name(Verdict v);

struct VerifyStats {
    std::uint64_t phases_explored = 0;  // total phase assignments reaching the LP stage
    std::uint64_t phases_pruned = 0;    // subtrees cut by bound propagation
    std::uint64_t lp_solves = 0;
};

struct VerificationResult {
    Verdict verdict = Verdict::Unknown;
    std::optional<Eigen::VectorXd> counterexample;
    double counterexample_margin = 0.0;
    VerifyStats stats;
};

struct VerifyOptions {
    bool prune = true;
    int threads = 1;
    int lp_pivot_budget = 200000;
};

// Sound per-neuron pre-activation intervals over the box, with NAP states
// folded in (Zero clamps the post-activation to 0; One keeps z >= 0 closure).
struct NeuronBounds {
    std::vector<Eigen::VectorXd> lower;  // pre-activation z, per hidden layer
    std::vector<Eigen::VectorXd> upper;
};

NeuronBounds bound_propagation(const Network& net, const InputDomain& box, const Nap& p);

struct MinMarginResult {
    bool feasible = false;
    double value = 0.0;
    Eigen::VectorXd argmin;
    LpStatus lp_status = LpStatus::Infeasible;
};

// Minimum of F_c - F_k over the box with every ReLU locked by `phase`
// (ForcedInactive: z <= 0, zhat = 0; ForcedActive: z >= 0, zhat = z). For
// scalar-output networks pass k < 0 and F itself is minimized.
MinMarginResult min_margin_under_phase(const Network& net, const PhaseAssignment& phase,
                                       const InputDomain& box, int c, int k,
                                       int max_pivots = 200000);

VerificationResult verify(const Network& net, const Nap& p, const RobustnessQuery& query,
                          const VerifyOptions& opts = {});

struct NonAmbiguityResult {
    bool disjoint = true;
    std::optional<Eigen::VectorXd> witness;  // exhibits both NAPs when present
    bool exhausted = false;                  // budget ran out before a decision
};

NonAmbiguityResult check_non_ambiguity(const Network& net, const Nap& p1, const Nap& p2,
                                       const InputDomain& domain,
                                       const VerifyOptions& opts = {});

}  // namespace napmin
