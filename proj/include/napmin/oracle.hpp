#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "napmin/nap.hpp"
#include "napmin/verifier.hpp"

namespace napmin {

enum class Outcome { Pass, Fail, Unknown };
std::string outcome_name(Outcome o);

struct OracleVerdict {
    Outcome outcome = Outcome::Fail;
    std::optional<Eigen::VectorXd> counterexample;  // Fail only
};

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleVerdict query(const Nap& p) = 0;
    virtual const std::vector<int>& signature() const = 0;
};

// Monotone DNF model of a verifier: Pass iff some clause has every neuron
// refined (non-Star). Clauses are stored sorted for deterministic round-trips.
class SyntheticOracle : public Oracle {
public:
    SyntheticOracle(std::vector<int> signature, std::vector<std::vector<int>> clauses);

    static SyntheticOracle load(const std::string& path);
    void save(const std::string& path) const;

    OracleVerdict query(const Nap& p) override;
    const std::vector<int>& signature() const override { return signature_; }
    const std::vector<std::vector<int>>& clauses() const { return clauses_; }

private:
    std::vector<int> signature_;
    std::vector<std::vector<int>> clauses_;
    int neuron_count_ = 0;
};

class CountingOracle : public Oracle {
public:
    explicit CountingOracle(Oracle& inner) : inner_(inner) {}

    OracleVerdict query(const Nap& p) override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return inner_.query(p);
    }
    const std::vector<int>& signature() const override { return inner_.signature(); }

    std::uint64_t count_calls() const { return count_.load(std::memory_order_relaxed); }
    void reset_calls() { count_.store(0, std::memory_order_relaxed); }

private:
    Oracle& inner_;
    std::atomic<std::uint64_t> count_{0};
};

// Wraps the built-in verifier as V: P -> {Pass, Fail, Unknown}. Minimization
// loops treat Unknown the same as Fail (the neuron under test stays refined);
// the verdict itself is preserved for reporting.
class VerifierOracle : public Oracle {
public:
    VerifierOracle(const Network& net, RobustnessQuery query, VerifyOptions opts = {});

    OracleVerdict query(const Nap& p) override;
    const std::vector<int>& signature() const override { return signature_; }
    const VerificationResult& last_result() const { return last_; }

private:
    const Network& net_;
    RobustnessQuery query_;
    VerifyOptions opts_;
    std::vector<int> signature_;
    VerificationResult last_;
};

std::unique_ptr<Oracle> oracle_from_verifier(const Network& net, const RobustnessQuery& query,
                                             const VerifyOptions& opts = {});

}  // namespace napmin
