#pragma once

#include <vector>

#include "napmin/estimate.hpp"
#include "napmin/nap.hpp"
#include "napmin/network.hpp"

namespace napmin {

// Fraction of class-c rows whose binary pattern is subsumed by P (strict
// exhibits semantics: a row sitting exactly on a One boundary is uncovered).
double coverage(const Network& net, const Nap& p, const Dataset& data, int c);

struct RejectionReport {
    int attempted = 0;  // class-c rows correctly classified and exhibiting P
    int succeeded = 0;  // attacks that produced an adversarial example
    int rejected = 0;   // successful adversarials that do not exhibit P
};

RejectionReport adversarial_rejection(const Network& net, const Nap& p, const Dataset& data,
                                      int c, const InputDomain& domain,
                                      const AttackConfig& cfg, int trials_per_row);

// Rows exhibiting at least two of the given NAPs.
int non_ambiguity_empirical(const Network& net, const std::vector<Nap>& naps,
                            const Dataset& data);

}  // namespace napmin
