#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
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

using nlohmann::json;
using namespace napmin;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitRefinedFails = 3;
constexpr int kExitUnknown = 4;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << text << "\n";
}

InputDomain domain_from_flags(int dim, const std::vector<double>& lower,
                              const std::vector<double>& upper) {
    if (lower.empty() && upper.empty()) return InputDomain::unit_box(dim);
    if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim)
        throw std::runtime_error("--lower/--upper must both have one value per input dimension");
    InputDomain d;
    d.lower = Eigen::Map<const Eigen::VectorXd>(lower.data(), dim);
    d.upper = Eigen::Map<const Eigen::VectorXd>(upper.data(), dim);
    for (int i = 0; i < dim; ++i)
        if (d.lower[i] > d.upper[i]) throw std::runtime_error("--lower exceeds --upper");
    return d;
}

Eigen::MatrixXd class_rows(const Dataset& data, int c) {
    int count = 0;
    for (int label : data.labels)
        if (label == c) ++count;
    if (count == 0)
        throw std::runtime_error("dataset has no rows of class " + std::to_string(c));
    Eigen::MatrixXd rows(count, data.xs.cols());
    int at = 0;
    for (int r = 0; r < data.size(); ++r)
        if (data.labels[r] == c) rows.row(at++) = data.xs.row(r);
    return rows;
}

Nap all_one_nap(const std::vector<int>& signature) {
    Nap p = Nap::coarsest(signature);
    for (int i = 0; i < p.neuron_count(); ++i) p.set_state(i, ActivationState::One);
    return p;
}

std::vector<int> planted_clause(int n, int s, Rng& rng) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < s; ++i) {
        const std::uint64_t j = i + rng.uniform_int(static_cast<std::uint64_t>(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(s);
    std::sort(pool.begin(), pool.end());
    return pool;
}

struct SimRow {
    int trial;
    std::uint64_t calls;
    int success;
};

std::string format_stat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Activation-pattern specification toolkit"};
    app.require_subcommand(1);

    std::string model_path, data_path, nap_path, nap2_path, query_path, oracle_path, out_path;
    std::string algo, theta_mode = "fixed";
    int cls = 0;
    double delta = 0.99;
    std::uint64_t seed = 0;
    int threads = 1;
    double eta = 0.1;
    double theta = -1.0;
    int target_s = -1;
    std::uint64_t budget = 10000;
    int k_samples = 100;
    std::vector<int> seed_set;
    bool force_large = false;
    bool no_prune = false;
    double tol = 1e-4;
    std::vector<double> lower_flag, upper_flag;
    double eps = 0.0, alpha = 0.0;
    int iterations = 40, restarts = 5, trials = 1;
    double beta = 0.0, gamma = 0.0;
    int sim_n = 16, sim_trials = 100, planted_size = 4;

    auto* cmd_extract = app.add_subcommand("extract", "Compute a class NAP from a dataset");
    cmd_extract->add_option("--model", model_path)->required();
    cmd_extract->add_option("--data", data_path)->required();
    cmd_extract->add_option("--class", cls)->required();
    cmd_extract->add_option("--delta", delta);
    cmd_extract->add_option("--out", out_path);

    auto* cmd_minimize = app.add_subcommand("minimize", "Search for a minimal NAP specification");
    cmd_minimize->add_option("--algo", algo)
        ->required()
        ->check(CLI::IsMember({"coarsen", "stoch", "refine", "sample-refine"}));
    cmd_minimize->add_option("--model", model_path);
    cmd_minimize->add_option("--data", data_path);
    cmd_minimize->add_option("--query", query_path);
    cmd_minimize->add_option("--oracle", oracle_path);
    cmd_minimize->add_option("--delta", delta);
    cmd_minimize->add_option("--seed", seed);
    cmd_minimize->add_option("--eta", eta);
    cmd_minimize->add_option("--theta", theta);
    cmd_minimize->add_option("--s", target_s);
    cmd_minimize->add_option("--budget", budget);
    cmd_minimize->add_option("--k", k_samples);
    cmd_minimize->add_option("--seed-set", seed_set)->delimiter(',');
    cmd_minimize->add_flag("--force-large", force_large);
    cmd_minimize->add_option("--threads", threads);
    cmd_minimize->add_option("--out", out_path);

    auto* cmd_verify = app.add_subcommand("verify", "Run the built-in verifier on a NAP query");
    cmd_verify->add_option("--model", model_path)->required();
    cmd_verify->add_option("--nap", nap_path)->required();
    cmd_verify->add_option("--query", query_path)->required();
    cmd_verify->add_flag("--no-prune", no_prune);
    cmd_verify->add_option("--threads", threads);
    cmd_verify->add_option("--out", out_path);

    auto* cmd_volume = app.add_subcommand("volume", "Estimate the verifiable region volume");
    cmd_volume->add_option("--model", model_path)->required();
    cmd_volume->add_option("--nap", nap_path)->required();
    cmd_volume->add_option("--data", data_path)->required();
    cmd_volume->add_option("--tol", tol);
    cmd_volume->add_option("--lower", lower_flag)->delimiter(',');
    cmd_volume->add_option("--upper", upper_flag)->delimiter(',');
    cmd_volume->add_option("--seed", seed);
    cmd_volume->add_option("--out", out_path);

    auto* cmd_coverage = app.add_subcommand("coverage", "Dataset metrics for a NAP");
    cmd_coverage->add_option("--model", model_path)->required();
    cmd_coverage->add_option("--nap", nap_path)->required();
    cmd_coverage->add_option("--data", data_path)->required();
    cmd_coverage->add_option("--class", cls)->required();
    cmd_coverage->add_option("--nap2", nap2_path);
    cmd_coverage->add_option("--eps", eps);
    cmd_coverage->add_option("--alpha", alpha);
    cmd_coverage->add_option("--iterations", iterations);
    cmd_coverage->add_option("--restarts", restarts);
    cmd_coverage->add_option("--trials", trials);
    cmd_coverage->add_option("--seed", seed);
    cmd_coverage->add_option("--lower", lower_flag)->delimiter(',');
    cmd_coverage->add_option("--upper", upper_flag)->delimiter(',');
    cmd_coverage->add_option("--out", out_path);

    auto* cmd_estimate = app.add_subcommand("estimate", "Estimate essential neurons");
    cmd_estimate->add_option("--algo", algo)
        ->required()
        ->check(CLI::IsMember({"adv-prune", "gradient"}));
    cmd_estimate->add_option("--model", model_path)->required();
    cmd_estimate->add_option("--data", data_path)->required();
    cmd_estimate->add_option("--class", cls)->required();
    cmd_estimate->add_option("--nap", nap_path)->required();
    cmd_estimate->add_option("--eps", eps);
    cmd_estimate->add_option("--alpha", alpha);
    cmd_estimate->add_option("--iterations", iterations);
    cmd_estimate->add_option("--restarts", restarts);
    cmd_estimate->add_option("--seed", seed);
    cmd_estimate->add_option("--beta", beta);
    cmd_estimate->add_option("--gamma", gamma);
    cmd_estimate->add_option("--lower", lower_flag)->delimiter(',');
    cmd_estimate->add_option("--upper", upper_flag)->delimiter(',');
    cmd_estimate->add_option("--out", out_path);

    auto* cmd_simulate = app.add_subcommand("simulate", "Call-complexity trials on synthetic oracles");
    cmd_simulate->add_option("--algo", algo)
        ->required()
        ->check(CLI::IsMember({"coarsen", "stoch", "refine", "sample-refine"}));
    cmd_simulate->add_option("--n", sim_n);
    auto* opt_sim_s = cmd_simulate->add_option("--s", target_s);
    auto* opt_planted = cmd_simulate->add_option("--planted-size", planted_size);
    cmd_simulate->add_option("--clauses", oracle_path);
    cmd_simulate->add_option("--trials", sim_trials);
    cmd_simulate->add_option("--theta-mode", theta_mode)
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    cmd_simulate->add_option("--theta", theta);
    cmd_simulate->add_option("--eta", eta);
    cmd_simulate->add_option("--budget", budget);
    cmd_simulate->add_option("--k", k_samples);
    cmd_simulate->add_option("--seed", seed);
    cmd_simulate->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (cmd_extract->parsed()) {
            const Network net = load_model(model_path);
            const Dataset data = load_dataset(data_path);
            const Nap p = class_nap(net, data, cls, AbstractionConfig{delta});
            int zeros = 0, ones = 0, stars = 0;
            for (int i = 0; i < p.neuron_count(); ++i) {
                switch (p.state(i)) {
                    case ActivationState::Zero: ++zeros; break;
                    case ActivationState::One: ++ones; break;
                    default: ++stars; break;
                }
            }
            std::fprintf(stderr, "size=%d zeros=%d ones=%d stars=%d\n", p.size(), zeros,
                         ones, stars);
            write_output(nap_to_json(p), out_path);
            return 0;
        }

        if (cmd_minimize->parsed()) {
            std::optional<SyntheticOracle> synth;
            std::optional<Network> net;
            std::unique_ptr<Oracle> verifier_oracle;
            Oracle* inner = nullptr;
            Nap ref;
            if (!oracle_path.empty()) {
                synth = SyntheticOracle::load(oracle_path);
                ref = all_one_nap(synth->signature());
                inner = &*synth;
            } else {
                if (model_path.empty() || data_path.empty() || query_path.empty())
                    throw std::runtime_error(
                        "minimize needs --oracle or all of --model/--data/--query");
                net = load_model(model_path);
                const Dataset data = load_dataset(data_path);
                const RobustnessQuery query = load_query(query_path);
                ref = class_nap(*net, data, query.target_class, AbstractionConfig{delta});
                VerifyOptions opts;
                opts.threads = threads;
                verifier_oracle = oracle_from_verifier(*net, query, opts);
                inner = verifier_oracle.get();
            }
            CountingOracle counting(*inner);

            MinimizeReport report;
            if (algo == "coarsen") {
                report = coarsen(ref, counting);
            } else if (algo == "stoch") {
                StochConfig cfg;
                if (theta > 0.0) cfg.theta0 = theta;
                cfg.eta = eta;
                if (target_s >= 0) cfg.target_size = target_s;
                cfg.max_calls = budget;
                cfg.seed = seed;
                report = stoch_coarsen(ref, counting, cfg);
            } else if (algo == "refine") {
                report = refine_search(counting, ref.signature(), ref, force_large);
            } else {
                SampleRefineConfig cfg;
                if (theta > 0.0) cfg.theta = theta;
                cfg.k = k_samples;
                cfg.s = target_s >= 0 ? target_s : 1;
                cfg.seed = seed;
                cfg.seed_set = seed_set;
                cfg.max_calls = budget;
                report = sample_refine(counting, ref, cfg);
            }
            write_output(report_to_json(report), out_path);
            return report.terminated_by == TerminatedBy::RefinedFails ? kExitRefinedFails : 0;
        }

        if (cmd_verify->parsed()) {
            const Network net = load_model(model_path);
            const Nap p = load_nap(nap_path);
            const RobustnessQuery query = load_query(query_path);
            VerifyOptions opts;
            opts.prune = !no_prune;
            opts.threads = threads;
            const VerificationResult result = verify(net, p, query, opts);
            json doc;
            doc["verdict"] = verdict_name(result.verdict);
            if (result.counterexample) {
                doc["counterexample"] = std::vector<double>(
                    result.counterexample->data(),
                    result.counterexample->data() + result.counterexample->size());
                doc["counterexample_margin"] = result.counterexample_margin;
            } else {
                doc["counterexample"] = nullptr;
                doc["counterexample_margin"] = nullptr;
            }
            doc["stats"]["phases_explored"] = result.stats.phases_explored;
            doc["stats"]["phases_pruned"] = result.stats.phases_pruned;
            doc["stats"]["lp_solves"] = result.stats.lp_solves;
            write_output(doc.dump(2), out_path);
            return result.verdict == Verdict::Unknown ? kExitUnknown : 0;
        }

        if (cmd_volume->parsed()) {
            const Network net = load_model(model_path);
            const Nap p = load_nap(nap_path);
            const Dataset data = load_dataset(data_path);
            const InputDomain domain =
                domain_from_flags(net.input_dim, lower_flag, upper_flag);
            const Eigen::VectorXd center = pseudo_center(net, p, data.xs, seed);
            const Orthotope o = expand_orthotope(net, p, center, domain, tol);
            write_output(orthotope_to_json(o), out_path);
            return 0;
        }

        if (cmd_coverage->parsed()) {
            const Network net = load_model(model_path);
            const Nap p = load_nap(nap_path);
            const Dataset data = load_dataset(data_path);
            json doc;
            doc["coverage"] = coverage(net, p, data, cls);
            if (eps > 0.0) {
                const InputDomain domain =
                    domain_from_flags(net.input_dim, lower_flag, upper_flag);
                AttackConfig cfg;
                cfg.eps = eps;
                cfg.alpha = alpha;
                cfg.iterations = iterations;
                cfg.restarts = restarts;
                cfg.seed = seed;
                const RejectionReport rej =
                    adversarial_rejection(net, p, data, cls, domain, cfg, trials);
                doc["rejection"]["attempted"] = rej.attempted;
                doc["rejection"]["succeeded"] = rej.succeeded;
                doc["rejection"]["rejected"] = rej.rejected;
            }
            if (!nap2_path.empty()) {
                const Nap p2 = load_nap(nap2_path);
                doc["ambiguity"] = non_ambiguity_empirical(net, {p, p2}, data);
            }
            write_output(doc.dump(2), out_path);
            return 0;
        }

        if (cmd_estimate->parsed()) {
            const Network net = load_model(model_path);
            const Dataset data = load_dataset(data_path);
            const Nap p = load_nap(nap_path);
            const Eigen::MatrixXd rows = class_rows(data, cls);
            NeuronSet result;
            if (algo == "adv-prune") {
                const InputDomain domain =
                    domain_from_flags(net.input_dim, lower_flag, upper_flag);
                AttackConfig cfg;
                cfg.eps = eps;
                cfg.alpha = alpha;
                cfg.iterations = iterations;
                cfg.restarts = restarts;
                cfg.seed = seed;
                result = opt_adv_prune(net, rows, cls, p, domain, cfg);
            } else {
                result = gradient_search(net, rows, cls, p, GradientSearchConfig{beta, gamma});
            }
            write_output(neuron_set_to_json(result), out_path);
            return 0;
        }

        // simulate
        const std::string algo_name = algo;
        const int sim_s = opt_sim_s->count() > 0 ? target_s : 4;
        if (opt_planted->count() == 0) planted_size = sim_s;
        std::vector<SimRow> rows;
        Rng root(seed);
        std::optional<SyntheticOracle> file_oracle;
        if (!oracle_path.empty()) file_oracle = SyntheticOracle::load(oracle_path);
        const std::vector<int> signature = file_oracle
                                               ? file_oracle->signature()
                                               : std::vector<int>{sim_n};
        const int n_total = file_oracle ? all_one_nap(file_oracle->signature()).neuron_count()
                                        : sim_n;
        for (int trial = 0; trial < sim_trials; ++trial) {
            std::vector<int> clause;
            std::optional<SyntheticOracle> planted;
            Oracle* inner;
            if (file_oracle) {
                inner = &*file_oracle;
            } else {
                Rng crng = root.split(static_cast<std::uint64_t>(trial) * 2);
                clause = planted_clause(n_total, planted_size, crng);
                planted.emplace(signature, std::vector<std::vector<int>>{clause});
                inner = &*planted;
            }
            CountingOracle counting(*inner);
            const Nap ref = all_one_nap(signature);
            const std::uint64_t algo_seed =
                root.split(static_cast<std::uint64_t>(trial) * 2 + 1).engine()();

            MinimizeReport report;
            if (algo_name == "coarsen") {
                report = coarsen(ref, counting);
            } else if (algo_name == "stoch") {
                StochConfig cfg;
                if (theta > 0.0) cfg.theta0 = theta;
                cfg.eta = eta;
                if (theta_mode == "fixed") cfg.target_size = sim_s;
                cfg.max_calls = budget;
                cfg.seed = algo_seed;
                report = stoch_coarsen(ref, counting, cfg);
            } else if (algo_name == "refine") {
                report = refine_search(counting, signature, ref, true);
            } else {
                SampleRefineConfig cfg;
                if (theta > 0.0) cfg.theta = theta;
                cfg.k = k_samples;
                cfg.s = sim_s;
                cfg.seed = algo_seed;
                cfg.max_calls = budget;
                report = sample_refine(counting, ref, cfg);
            }

            int success = 0;
            if (report.result && report.final_pass &&
                report.terminated_by != TerminatedBy::Budget) {
                if (clause.empty())
                    success = 1;
                else
                    success = report.result->refined_ordinals() == clause ? 1 : 0;
            }
            rows.push_back({trial, report.oracle_calls, success});
        }

        std::string csv = "algo,n,s,trial,calls,success\n";
        double mean = 0.0, success_rate = 0.0;
        std::vector<std::uint64_t> calls;
        for (const SimRow& row : rows) {
            csv += algo_name + "," + std::to_string(n_total) + "," +
                   std::to_string(sim_s) + "," + std::to_string(row.trial) + "," +
                   std::to_string(row.calls) + "," + std::to_string(row.success) + "\n";
            mean += static_cast<double>(row.calls);
            success_rate += row.success;
            calls.push_back(row.calls);
        }
        if (!rows.empty()) {
            mean /= rows.size();
            success_rate /= rows.size();
            std::sort(calls.begin(), calls.end());
            const size_t m = calls.size();
            const double median =
                m % 2 == 1 ? static_cast<double>(calls[m / 2])
                           : 0.5 * (static_cast<double>(calls[m / 2 - 1]) +
                                    static_cast<double>(calls[m / 2]));
            csv += algo_name + "," + std::to_string(n_total) + "," +
                   std::to_string(sim_s) + ",median," + format_stat(median) + "," +
                   format_stat(success_rate) + "\n";
            csv += algo_name + "," + std::to_string(n_total) + "," +
                   std::to_string(sim_s) + ",mean," + format_stat(mean) + "," +
                   format_stat(success_rate) + "\n";
        }
        if (out_path.empty()) {
            std::cout << csv;
        } else {
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write output file: " + out_path);
            out << csv;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
}
