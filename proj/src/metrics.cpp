#include "napmin/metrics.hpp"

#include <stdexcept>

#include "napmin/rng.hpp"

namespace napmin {

double coverage(const Network& net, const Nap& p, const Dataset& data, int c) {
    int total = 0;
    int covered = 0;
    for (int r = 0; r < data.size(); ++r) {
        if (data.labels[r] != c) continue;
        ++total;
        if (exhibits(net, data.xs.row(r).transpose(), p)) ++covered;
    }
    if (total == 0) throw std::runtime_error("coverage: no rows of the requested class");
    return static_cast<double>(covered) / total;
}

RejectionReport adversarial_rejection(const Network& net, const Nap& p, const Dataset& data,
                                      int c, const InputDomain& domain,
                                      const AttackConfig& cfg, int trials_per_row) {
    RejectionReport report;
    for (int r = 0; r < data.size(); ++r) {
        if (data.labels[r] != c) continue;
        const Eigen::VectorXd x = data.xs.row(r).transpose();
        if (margin(net, x, c) <= 0.0) continue;
        if (!exhibits(net, x, p)) continue;
        ++report.attempted;
        for (int t = 0; t < trials_per_row; ++t) {
            AttackConfig per = cfg;
            // Independent stream per (row, trial); trial 0 keeps the
            // deterministic start at x via the restart-0 convention.
            std::uint64_t s = cfg.seed;
            per.seed = splitmix64(s) ^
                       (static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL +
                        static_cast<std::uint64_t>(t));
            const auto adv = pgd_attack(net, x, c, domain, per);
            if (!adv) continue;
            ++report.succeeded;
            if (!exhibits(net, *adv, p)) ++report.rejected;
        }
    }
    return report;
}

int non_ambiguity_empirical(const Network& net, const std::vector<Nap>& naps,
                            const Dataset& data) {
    if (naps.size() < 2)
        throw std::runtime_error("non_ambiguity_empirical: need at least two NAPs");
    int conflicts = 0;
    for (int r = 0; r < data.size(); ++r) {
        const Nap binary = abstract_binary(net, data.xs.row(r).transpose());
        int hits = 0;
        for (const Nap& p : naps)
            if (subsumes(p, binary)) ++hits;
        if (hits >= 2) ++conflicts;
    }
    return conflicts;
}

}  // namespace napmin
