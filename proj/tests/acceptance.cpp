// Acceptance suite: one criterion per function, one PASS/FAIL line per
// criterion on stdout, nonzero exit when anything fails. Each check is
// self-contained and validates library behavior against independent
// ground truth (analytic minima, grid scans, finite differences, repeated
// CLI runs) rather than against other library calls.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "napmin/estimate.hpp"
#include "napmin/metrics.hpp"
#include "napmin/minimize.hpp"
#include "napmin/nap.hpp"
#include "napmin/network.hpp"
#include "napmin/oracle.hpp"
#include "napmin/rng.hpp"
#include "napmin/verifier.hpp"
#include "napmin/volume.hpp"
#include "util.hpp"

using namespace napmin;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Nap all_one(const std::vector<int>& sig) {
    Nap p = Nap::coarsest(sig);
    for (int i = 0; i < p.neuron_count(); ++i) p.set_state(i, ActivationState::One);
    return p;
}

Nap random_nap(Rng& rng, const std::vector<int>& sig) {
    static const ActivationState kStates[3] = {ActivationState::Zero, ActivationState::One,
                                               ActivationState::Star};
    Nap p = Nap::coarsest(sig);
    for (int i = 0; i < p.neuron_count(); ++i)
        p.set_state(i, kStates[rng.uniform_int(3)]);
    return p;
}

// Coarsen each refined neuron independently with probability prob.
Nap star_subset(Rng& rng, const Nap& fine, double prob) {
    Nap coarse = fine;
    for (int i = 0; i < coarse.neuron_count(); ++i)
        if (coarse.state(i) != ActivationState::Star && rng.bernoulli(prob))
            coarse.set_state(i, ActivationState::Star);
    return coarse;
}

// k distinct ordinals from [0, n), sorted. Partial Fisher-Yates on our own
// Rng so the draw is reproducible independent of the standard library.
std::vector<int> pick_subset(Rng& rng, int n, int k) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + static_cast<int>(rng.uniform_int(n - i))]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

SyntheticOracle random_oracle(Rng& rng, int n, int max_clauses, int max_clause_size) {
    const int m = 1 + static_cast<int>(rng.uniform_int(max_clauses));
    std::vector<std::vector<int>> clauses;
    for (int j = 0; j < m; ++j) {
        const int size = 1 + static_cast<int>(rng.uniform_int(std::min(max_clause_size, n)));
        clauses.push_back(pick_subset(rng, n, size));
    }
    return SyntheticOracle({n}, std::move(clauses));
}

// ---- criterion 1: partial-order laws ------------------------------------

bool criterion1(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> sig = {16, 16};
    Rng rng(101);
    int antisym_premises = 0;
    for (int it = 0; it < 10000; ++it) {
        const Nap p = random_nap(rng, sig);
        if (!subsumes(p, p)) {
            detail = "reflexivity failed";
            return false;
        }

        const Nap a = random_nap(rng, sig);
        const Nap b = it % 4 == 0 ? a : random_nap(rng, sig);
        if (subsumes(a, b) && subsumes(b, a)) {
            ++antisym_premises;
            if (!(a == b)) {
                detail = "antisymmetry failed";
                return false;
            }
        }

        // c <= b <= a by construction, so the transitivity premise is never
        // vacuous on this triple.
        const Nap fine = random_nap(rng, sig);
        const Nap mid = star_subset(rng, fine, 0.4);
        const Nap coarse = star_subset(rng, mid, 0.4);
        if (!subsumes(mid, fine) || !subsumes(coarse, mid) || !subsumes(coarse, fine)) {
            detail = "transitivity failed";
            return false;
        }
    }
    const double elapsed = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "10000 pairs+triples over {16,16}, %d antisymmetry premises, %.2fs",
                  antisym_premises, elapsed);
    detail = buf;
    return antisym_premises >= 1000 && elapsed < 5.0;
}

// ---- criterion 2: oracle monotonicity ------------------------------------

bool criterion2(std::string& detail) {
    Rng rng(202);
    int synth_premises = 0;
    for (int o = 0; o < 100; ++o) {
        const int n = 8 + static_cast<int>(rng.uniform_int(25));
        SyntheticOracle oracle = random_oracle(rng, n, 4, 6);
        for (int it = 0; it < 100; ++it) {
            const Nap fine = random_nap(rng, oracle.signature());
            const Nap coarse = star_subset(rng, fine, 0.5);
            if (oracle.query(coarse).outcome == Outcome::Pass) {
                ++synth_premises;
                if (oracle.query(fine).outcome != Outcome::Pass) {
                    detail = "synthetic violation: coarse passes, refinement fails";
                    return false;
                }
            }
        }
    }

    const Network net = testutil::load_fixture2x2();
    const RobustnessQuery q0 = load_query(testutil::fixture_path("query_class0_box.json"));
    const RobustnessQuery q1 = load_query(testutil::fixture_path("query_class1_ball.json"));
    VerifierOracle v0(net, q0);
    VerifierOracle v1(net, q1);
    int verifier_premises = 0;
    for (int it = 0; it < 100; ++it) {
        VerifierOracle& v = it % 2 == 0 ? v0 : v1;
        const Nap fine = random_nap(rng, net.signature());
        const Nap coarse = star_subset(rng, fine, 0.5);
        if (v.query(coarse).outcome == Outcome::Pass) {
            ++verifier_premises;
            if (v.query(fine).outcome != Outcome::Pass) {
                detail = "verifier violation: coarse passes, refinement fails";
                return false;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "0 violations (10000 synthetic pairs, %d premises; 100 verifier pairs, %d premises)",
                  synth_premises, verifier_premises);
    detail = buf;
    return synth_premises >= 100 && verifier_premises >= 5;
}

// ---- criterion 3: coarsen correctness and call count ----------------------

bool criterion3(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(303);
    for (int it = 0; it < 200; ++it) {
        const int n = 8 + static_cast<int>(rng.uniform_int(57));
        SyntheticOracle oracle = random_oracle(rng, n, 4, 6);
        CountingOracle counting(oracle);
        const Nap ref = all_one(oracle.signature());
        const MinimizeReport report = coarsen(ref, counting);
        if (counting.count_calls() != static_cast<std::uint64_t>(n) + 1) {
            detail = "call count != |N|+1";
            return false;
        }
        if (!report.result || oracle.query(*report.result).outcome != Outcome::Pass) {
            detail = "output does not pass";
            return false;
        }
        for (int ord : report.result->refined_ordinals()) {
            if (oracle.query(coarsen_neuron(*report.result, ord)).outcome == Outcome::Pass) {
                detail = "output is not 1-minimal";
                return false;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "200 oracles, |N| in [8,64], calls == |N|+1, outputs 1-minimal, %.2fs",
                  elapsed);
    detail = buf;
    return elapsed < 30.0;
}

// ---- criterion 4: refine exactness ----------------------------------------

bool criterion4(std::string& detail) {
    Rng rng(404);
    for (int it = 0; it < 50; ++it) {
        const int n = 4 + static_cast<int>(rng.uniform_int(9));
        SyntheticOracle oracle = random_oracle(rng, n, 3, n);
        CountingOracle counting(oracle);
        const Nap ref = all_one(oracle.signature());

        // Brute-force minimum: query every subset in ascending-size order.
        int brute = -1;
        for (int size = 0; size <= n && brute < 0; ++size) {
            std::vector<bool> mask(n, false);
            std::fill(mask.begin(), mask.begin() + size, true);
            do {
                std::vector<int> ords;
                for (int i = 0; i < n; ++i)
                    if (mask[i]) ords.push_back(i);
                if (oracle.query(restrict_to(ref, ords)).outcome == Outcome::Pass) {
                    brute = size;
                    break;
                }
            } while (std::prev_permutation(mask.begin(), mask.end()));
        }

        const MinimizeReport report = refine_search(counting, oracle.signature(), ref);
        if (!report.result || report.result->size() != brute) {
            detail = "result size differs from brute-force minimum";
            return false;
        }
        if (counting.count_calls() > (1ull << n)) {
            detail = "call count exceeds 2^|N|";
            return false;
        }
    }
    detail = "50 oracles, |N| in [4,12], sizes match brute force, calls <= 2^|N|";
    return true;
}

// ---- criterion 5: StochCoarsen scaling -------------------------------------

bool criterion5(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const int configs[3][2] = {{64, 4}, {256, 8}, {256, 16}};
    std::ostringstream note;
    for (int ci = 0; ci < 3; ++ci) {
        const int n = configs[ci][0];
        const int s = configs[ci][1];
        const double bound = 3.0 * (std::exp(1.0) * s * std::log(n) + s + 1);
        Rng planter(505 + ci);
        std::vector<std::uint64_t> calls;
        int successes = 0;
        for (int t = 0; t < 200; ++t) {
            const std::vector<int> clause = pick_subset(planter, n, s);
            SyntheticOracle oracle({n}, {clause});
            const Nap ref = all_one(oracle.signature());
            StochConfig cfg;
            cfg.target_size = s;
            cfg.max_calls = 20000;
            cfg.seed = static_cast<std::uint64_t>(ci) * 1000 + t;
            const MinimizeReport report = stoch_coarsen(ref, oracle, cfg);
            if (report.terminated_by == TerminatedBy::SizeTarget && report.result &&
                report.result->refined_ordinals() == clause)
                ++successes;
            calls.push_back(report.oracle_calls);
        }
        std::sort(calls.begin(), calls.end());
        const double median = 0.5 * (calls[99] + calls[100]);
        if (successes != 200) {
            detail = "success rate below 100%";
            return false;
        }
        if (median > bound) {
            detail = "median call count exceeds 3(e s ln|N| + s + 1)";
            return false;
        }
        note << (ci ? "; " : "") << n << "/" << s << ": 200/200, median " << median
             << " <= " << static_cast<int>(bound);
    }
    const double elapsed = seconds_since(t0);
    char buf[64];
    std::snprintf(buf, sizeof buf, ", %.2fs", elapsed);
    detail = note.str() + buf;
    return elapsed < 120.0;
}

// ---- criterion 6: adaptive theta stationarity ------------------------------

bool criterion6(std::string& detail) {
    SyntheticOracle oracle({16}, {{2, 5, 9, 14}});
    const Nap ref = all_one(oracle.signature());
    const Nap coarse = Nap::coarsest(oracle.signature());
    std::vector<int> candidates(16);
    std::iota(candidates.begin(), candidates.end(), 0);

    // Stationary loop: the candidate set never shrinks, only theta moves.
    Rng rng(606);
    double lambda = 0.0;
    int recent_passes = 0;
    for (int t = 0; t < 2000; ++t) {
        const double theta = sigmoid(lambda);
        const Nap sample = sample_nap(candidates, theta, rng, ref, coarse);
        const bool pass = oracle.query(sample).outcome == Outcome::Pass;
        lambda = update_theta(lambda, pass ? 1 : 0, 0.1);
        if (t >= 1800 && pass) ++recent_passes;
    }
    const double rate = recent_passes / 200.0;
    const double target = std::exp(-1.0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "last-200 pass rate %.3f, target %.3f +/- 0.1", rate,
                  target);
    detail = buf;
    return std::abs(rate - target) <= 0.1;
}

// ---- criterion 7: Sample_Refine identification -----------------------------

bool criterion7(std::string& detail) {
    int hits = 0;
    Rng planter(707);
    for (int r = 0; r < 100; ++r) {
        const std::vector<int> pair = pick_subset(planter, 32, 2);
        SyntheticOracle oracle({32}, {{pair[0]}, {pair[1]}});
        const Nap ref = all_one(oracle.signature());
        SampleRefineConfig cfg;
        cfg.theta = 4.0 / 9.0;  // (2/3)^2
        cfg.k = 600;
        cfg.s = 1;
        cfg.seed = 9000 + r;
        const MinimizeReport report = sample_refine(oracle, ref, cfg);
        if (report.result && report.final_pass && report.result->size() == 1) {
            const int picked = report.result->refined_ordinals()[0];
            if (picked == pair[0] || picked == pair[1]) ++hits;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "first pick landed in M in %d/100 runs (need >= 80)",
                  hits);
    detail = buf;
    return hits >= 80;
}

// ---- criterion 8: verifier soundness ---------------------------------------

bool criterion8(std::string& detail) {
    const Network net = testutil::load_fixture2x2();
    const std::vector<int> sig = net.signature();
    Rng rng(808);
    int verified = 0, falsified = 0, unknown = 0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd center = testutil::vec2(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
        RobustnessQuery q;
        q.target_class = static_cast<int>(rng.uniform_int(2));
        q.domain = InputDomain::unit_box(2);
        q.ball = Ball{center, rng.uniform(0.02, 0.25)};
        const Nap p = random_nap(rng, sig);

        VerifyOptions on, off;
        off.prune = false;
        const VerificationResult a = verify(net, p, q, on);
        const VerificationResult b = verify(net, p, q, off);
        if (a.verdict != b.verdict) {
            detail = "pruning changed the verdict";
            return false;
        }
        if (a.verdict == Verdict::Verified) {
            ++verified;
            // Exhaustive 400x400 scan of the ball-and-domain box; any point
            // exhibiting P must keep a nonnegative margin.
            const double lo0 = std::max(0.0, center[0] - q.ball->eps);
            const double hi0 = std::min(1.0, center[0] + q.ball->eps);
            const double lo1 = std::max(0.0, center[1] - q.ball->eps);
            const double hi1 = std::min(1.0, center[1] + q.ball->eps);
            for (int i = 0; i < 400; ++i) {
                for (int j = 0; j < 400; ++j) {
                    const Eigen::VectorXd x =
                        testutil::vec2(lo0 + (hi0 - lo0) * i / 399.0,
                                       lo1 + (hi1 - lo1) * j / 399.0);
                    const ActivationTrace tr = forward(net, x);
                    std::vector<ActivationState> states;
                    for (const auto& z : tr.pre)
                        for (int u = 0; u < z.size(); ++u)
                            states.push_back(z[u] > 0.0 ? ActivationState::One
                                                        : ActivationState::Zero);
                    if (!subsumes(p, Nap(sig, std::move(states)))) continue;
                    const double m =
                        tr.output[q.target_class] - tr.output[1 - q.target_class];
                    if (m < -1e-9) {
                        detail = "Verified query has a violating grid point";
                        return false;
                    }
                }
            }
        } else if (a.verdict == Verdict::Falsified) {
            ++falsified;
            if (!a.counterexample) {
                detail = "Falsified without a counterexample";
                return false;
            }
            const Eigen::VectorXd& cex = *a.counterexample;
            if (margin(net, cex, q.target_class) > q.tau + 1e-9 ||
                !exhibits(net, cex, p) || !q.domain.contains(cex, 1e-9) ||
                (cex - center).lpNorm<Eigen::Infinity>() > q.ball->eps + 1e-9) {
                detail = "counterexample fails validation";
                return false;
            }
        } else {
            // Unknown is the verifier declining to decide (a One-constrained
            // neuron pinned to its z = 0 face); soundness claims only bind
            // Verified and Falsified verdicts.
            ++unknown;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "50 random queries: %d Verified (grid-clean), %d Falsified (cex valid), %d Unknown",
                  verified, falsified, unknown);
    detail = buf;
    return verified >= 5 && falsified >= 5;
}

// ---- criterion 9: gradient correctness -------------------------------------

bool criterion9(std::string& detail) {
    Rng rng(909);
    const double h = 1e-5;
    int accepted = 0;
    double worst = 0.0;
    for (int attempt = 0; attempt < 10000 && accepted < 100; ++attempt) {
        const int in_dim = 2 + static_cast<int>(rng.uniform_int(3));
        const int hidden = 1 + static_cast<int>(rng.uniform_int(2));
        const int out_dim = 2 + static_cast<int>(rng.uniform_int(2));
        Network net;
        net.input_dim = in_dim;
        int prev = in_dim;
        for (int l = 0; l < hidden + 1; ++l) {
            const int width = l == hidden ? out_dim : 2 + static_cast<int>(rng.uniform_int(4));
            Layer layer;
            layer.weights = Eigen::MatrixXd(width, prev);
            layer.bias = Eigen::VectorXd(width);
            for (int r = 0; r < width; ++r) {
                for (int c = 0; c < prev; ++c) layer.weights(r, c) = rng.uniform(-1.0, 1.0);
                layer.bias[r] = rng.uniform(-0.5, 0.5);
            }
            net.layers.push_back(std::move(layer));
            prev = width;
        }

        Eigen::VectorXd x(in_dim);
        for (int i = 0; i < in_dim; ++i) x[i] = rng.uniform(-1.0, 1.0);
        const int c = static_cast<int>(rng.uniform_int(out_dim));

        // Stay away from ReLU kinks and from ties in the runner-up max.
        const ActivationTrace tr = forward(net, x);
        bool near_kink = false;
        for (const auto& z : tr.pre)
            for (int u = 0; u < z.size(); ++u)
                if (std::abs(z[u]) < 1e-3) near_kink = true;
        if (out_dim >= 3) {
            std::vector<double> others;
            for (int k = 0; k < out_dim; ++k)
                if (k != c) others.push_back(tr.output[k]);
            std::sort(others.begin(), others.end());
            if (others[others.size() - 1] - others[others.size() - 2] < 1e-3)
                near_kink = true;
        }
        if (near_kink) continue;
        ++accepted;

        const Eigen::VectorXd g = grad_margin_wrt_input(net, x, c);
        double scale = std::max(g.lpNorm<Eigen::Infinity>(), 1e-3);
        for (int i = 0; i < in_dim; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (margin(net, xp, c) - margin(net, xm, c)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - g[i]) / scale);
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d nets, worst relative error %.2e (limit 1e-4)",
                  accepted, worst);
    detail = buf;
    return accepted == 100 && worst <= 1e-4;
}

// ---- criterion 10: OptAdvPrune definitional check ---------------------------

bool criterion10(std::string& detail) {
    const std::vector<int> sig = {2, 2};
    const std::vector<int> worked =
        xor_flagged_ordinals(Nap::parse(sig, "10*1"), Nap::parse(sig, "1010"));
    if (worked != std::vector<int>{3}) {
        detail = "worked XOR example did not flag exactly the fourth neuron";
        return false;
    }

    const Network net = testutil::load_fixture2x2();
    Eigen::MatrixXd rows(3, 2);
    rows << 0.7, 0.56, 0.2, 0.2, 0.3, 0.3;
    const InputDomain domain = InputDomain::unit_box(2);
    AttackConfig cfg;
    cfg.eps = 0.3;
    cfg.seed = 4242;

    const Nap ref = Nap::parse(sig, "0000");
    const NeuronSet set = opt_adv_prune(net, rows, 0, ref, domain, cfg);
    if (set.neurons.empty()) {
        detail = "no neurons flagged on the attackable fixture rows";
        return false;
    }
    for (const FlaggedNeuron& f : set.neurons) {
        if (ref.state(f.ordinal) == ActivationState::Star) {
            detail = "a Star neuron was flagged";
            return false;
        }
        const bool witness_ok =
            f.rule == "adv_xor" && margin(net, f.witness, 0) <= 0.0 &&
            domain.contains(f.witness, 1e-9);
        const std::vector<int> replay =
            xor_flagged_ordinals(ref, abstract_binary(net, f.witness));
        if (!witness_ok ||
            std::find(replay.begin(), replay.end(), f.ordinal) == replay.end()) {
            detail = "a witness failed re-validation";
            return false;
        }
    }

    // With a Star in the reference, that ordinal must never appear.
    const NeuronSet starred =
        opt_adv_prune(net, rows, 0, Nap::parse(sig, "0*00"), domain, cfg);
    if (starred.contains(1)) {
        detail = "Star ordinal appeared in the output";
        return false;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "%zu flagged neurons re-validated, no Star outputs, XOR example -> {3}",
                  set.neurons.size());
    detail = buf;
    return true;
}

// ---- criterion 11: volume monotonicity --------------------------------------

bool criterion11(std::string& detail) {
    const Network net = testutil::load_fixture2x2();
    const Dataset train = testutil::load_train();
    const InputDomain domain = InputDomain::unit_box(2);
    Rng rng(1111);
    const double tol = 1e-4;
    for (int chain = 0; chain < 20; ++chain) {
        const Eigen::VectorXd anchor =
            train.xs.row(static_cast<int>(rng.uniform_int(train.size()))).transpose();
        Nap finer = abstract_binary(net, anchor);
        Orthotope prev = expand_orthotope(net, finer, anchor, domain, tol);
        while (finer.size() > 0) {
            // Star one surviving neuron at random to climb the chain.
            const std::vector<int> refined = finer.refined_ordinals();
            const Nap coarser =
                coarsen_neuron(finer, refined[rng.uniform_int(refined.size())]);
            const Orthotope next = expand_orthotope(net, coarser, anchor, domain, tol);
            for (int i = 0; i < 2; ++i) {
                if (next.lower[i] < prev.lower[i] - 5.0 * tol ||
                    next.upper[i] < prev.upper[i] - 5.0 * tol) {
                    detail = "a coarser NAP shrank an extent";
                    return false;
                }
            }
            if (!std::isinf(log_volume(prev)) && log_volume(next) < log_volume(prev) - 0.05) {
                detail = "log-volume decreased under coarsening";
                return false;
            }
            finer = coarser;
            prev = next;
        }
    }
    detail = "20 chains to the coarsest NAP, extents and log-volume nondecreasing";
    return true;
}

// ---- criterion 12: coverage antitonicity and rejection -----------------------

bool criterion12(std::string& detail) {
    const Network net = testutil::load_fixture2x2();
    const Dataset train = testutil::load_train();
    const Dataset test = testutil::load_test();
    Rng rng(1212);
    for (int chain = 0; chain < 10; ++chain) {
        const int row = static_cast<int>(rng.uniform_int(train.size()));
        const Eigen::VectorXd seed_x = train.xs.row(row).transpose();
        const int cls = train.labels[row];
        Nap finer = abstract_binary(net, seed_x);
        while (finer.size() > 0) {
            const std::vector<int> refined = finer.refined_ordinals();
            const Nap coarser =
                coarsen_neuron(finer, refined[rng.uniform_int(refined.size())]);
            // Covered sets nest: every row exhibiting the refinement also
            // exhibits the coarsening.
            for (int r = 0; r < test.size(); ++r) {
                const Eigen::VectorXd x = test.xs.row(r).transpose();
                if (exhibits(net, x, finer) && !exhibits(net, x, coarser)) {
                    detail = "covered sets failed to nest";
                    return false;
                }
            }
            if (coverage(net, coarser, test, cls) < coverage(net, finer, test, cls)) {
                detail = "coverage decreased under coarsening";
                return false;
            }
            finer = coarser;
        }
    }

    // Verified specification: every successful attack must leave the region.
    const Nap p = load_nap(testutil::fixture_path("nap_min_class0.json"));
    const RobustnessQuery q = load_query(testutil::fixture_path("query_class0_box.json"));
    if (verify(net, p, q).verdict != Verdict::Verified) {
        detail = "fixture specification is not Verified";
        return false;
    }
    AttackConfig cfg;
    cfg.eps = 0.4;
    cfg.seed = 2;
    const RejectionReport rr =
        adversarial_rejection(net, p, train, 0, InputDomain::unit_box(2), cfg, 1);
    if (rr.succeeded < 1) {
        detail = "no successful attacks to reject";
        return false;
    }
    if (rr.rejected != rr.succeeded) {
        detail = "a successful attack still exhibited the Verified NAP";
        return false;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "nesting holds on 10 chains; %d/%d attacks rejected (attempted %d)",
                  rr.rejected, rr.succeeded, rr.attempted);
    detail = buf;
    return true;
}

// ---- criterion 13: end-to-end determinism ------------------------------------

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string file;
};

CliRun run_cli(const testutil::TempDir& tmp, const std::string& args,
               const std::string& out_file, int run_id) {
    const std::string stdout_path = tmp.file("stdout_" + std::to_string(run_id));
    const std::string cmd = std::string(NAPMIN_CLI_PATH) + " " + args + " > " + stdout_path +
                            " 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    CliRun run;
    run.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    run.out = testutil::read_file(stdout_path);
    if (!out_file.empty()) run.file = testutil::read_file(out_file);
    return run;
}

bool criterion13(std::string& detail) {
    testutil::TempDir tmp;
    const auto fx = [](const std::string& n) { return testutil::fixture_path(n); };
    const std::string o = tmp.file("o.json");
    const std::vector<std::string> commands = {
        "extract --model " + fx("fixture2x2.json") + " --data " + fx("fixture2x2_train.csv") +
            " --class 0 --out " + o,
        "minimize --algo stoch --oracle " + fx("synthetic_small.json") +
            " --s 2 --seed 7 --out " + o,
        "minimize --algo sample-refine --oracle " + fx("synthetic_small.json") +
            " --k 30 --s 2 --seed 5 --out " + o,
        "simulate --algo stoch --n 32 --s 3 --trials 5 --seed 11",
        "simulate --algo sample-refine --n 16 --s 2 --k 40 --trials 3 --seed 4",
        "volume --model " + fx("fixture2x2.json") + " --nap " + fx("nap_min_class0.json") +
            " --data " + fx("fixture2x2_train.csv") + " --seed 3 --out " + o,
        "coverage --model " + fx("fixture2x2.json") + " --nap " + fx("nap_min_class0.json") +
            " --data " + fx("fixture2x2_train.csv") + " --class 0 --eps 0.4 --seed 9 --out " +
            o,
        "estimate --algo adv-prune --model " + fx("fixture2x2.json") + " --data " +
            fx("fixture2x2_train.csv") + " --class 0 --nap " + fx("nap_min_class0.json") +
            " --eps 0.3 --seed 6 --out " + o,
    };
    int checked = 0;
    for (const std::string& args : commands) {
        const bool writes_file = args.find("--out") != std::string::npos;
        const CliRun first = run_cli(tmp, args, writes_file ? o : "", 0);
        const CliRun second = run_cli(tmp, args, writes_file ? o : "", 1);
        if (first.exit_code != 0 || second.exit_code != 0) {
            detail = "a seeded command failed: " + args;
            return false;
        }
        if (first.out != second.out || first.file != second.file) {
            detail = "rerun produced different bytes: " + args;
            return false;
        }
        ++checked;
    }

    // Worker count must not leak into the output.
    const std::string verify_base = "verify --model " + fx("fixture2x2.json") + " --nap " +
                                    fx("nap_coarsest.json") + " --query " +
                                    fx("query_class0_box.json") + " --out " + o;
    const CliRun one = run_cli(tmp, verify_base + " --threads 1", o, 0);
    const CliRun four = run_cli(tmp, verify_base + " --threads 4", o, 1);
    if (one.exit_code != four.exit_code || one.out != four.out || one.file != four.file) {
        detail = "thread count changed verify output";
        return false;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "%d seeded commands byte-identical across reruns; verify stable at 1 vs 4 threads",
                  checked);
    detail = buf;
    return true;
}

}  // namespace

int main() {
    using Criterion = bool (*)(std::string&);
    const Criterion criteria[] = {criterion1, criterion2,  criterion3,  criterion4,
                                  criterion5, criterion6,  criterion7,  criterion8,
                                  criterion9, criterion10, criterion11, criterion12,
                                  criterion13};
    int failures = 0;
    for (int i = 0; i < 13; ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i](detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("criterion %d: %s (%s)\n", i + 1, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
