#include "corrl/harness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "corrl/divergence.hpp"

namespace corrl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void parallel_for(long n, int jobs, const std::function<void(long)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = static_cast<int>(std::min<long>(jobs, n));
    threads.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --- instance / model-class JSON -------------------------------------------

namespace {

json instance_to_json(const EpisodicMdp& model) {
    json j;
    j["num_states"] = model.num_states;
    j["num_actions"] = model.num_actions;
    j["horizon"] = model.horizon;
    j["initial_state"] = model.initial_state;
    if (!model.initial_dist.empty()) j["initial_dist"] = model.initial_dist;
    j["transitions"] = model.transitions;
    j["rewards"] = model.rewards;
    return j;
}

EpisodicMdp instance_from_json(const json& j) {
    EpisodicMdp model;
    model.num_states = j.at("num_states").get<int>();
    model.num_actions = j.at("num_actions").get<int>();
    model.horizon = j.at("horizon").get<int>();
    model.initial_state = j.at("initial_state").get<int>();
    if (j.contains("initial_dist"))
        model.initial_dist = j.at("initial_dist").get<std::vector<double>>();
    model.transitions =
        j.at("transitions").get<std::vector<std::vector<std::vector<double>>>>();
    model.rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
    model.validate();
    return model;
}

} // namespace

void save_instance_json(const std::string& path, const EpisodicMdp& model) {
    write_file_atomic(path, instance_to_json(model).dump(2) + "\n");
}

EpisodicMdp load_instance_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open instance file " + path);
    json j;
    in >> j;
    return instance_from_json(j);
}

void save_model_class_json(const std::string& path, const ModelClass& mc) {
    json j;
    j["true_index"] = mc.true_index;
    j["ratio_bound"] = mc.ratio_bound;
    j["models"] = json::array();
    for (const auto& m : mc.models) j["models"].push_back(instance_to_json(m));
    write_file_atomic(path, j.dump(2) + "\n");
}

ModelClass load_model_class_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model class file " + path);
    json j;
    in >> j;
    ModelClass mc;
    mc.true_index = j.at("true_index").get<int>();
    for (const auto& jm : j.at("models")) mc.models.push_back(instance_from_json(jm));
    mc.ratio_bound = ratio_bound(mc);
    mc.validate();
    return mc;
}

// --- experiment assembly ----------------------------------------------------

BuiltExperiment build_experiment(const ExperimentConfig& config) {
    BuiltExperiment built;
    const auto& inst = config.instance;
    const auto& mcs = config.model_class;

    double offline_eta = config.adversary.eta;
    if (inst.generator == "online_hard") {
        const auto hard = make_online_hard_instance(inst.d, inst.horizon, inst.seed);
        built.hard_optimal_actions = hard.optimal_actions;
        if (mcs.generator == "structured")
            built.model_class = make_structured_class_online(hard, mcs.cap);
        else if (mcs.generator == "perturbations-of-true")
            built.model_class = make_model_class_random(hard.mdp, mcs.count,
                                                        mcs.clamp, mcs.seed,
                                                        mcs.magnitude);
        else
            built.model_class = load_model_class_json(mcs.path);
    } else if (inst.generator == "offline_hard") {
        const auto hard = make_offline_hard_instance(inst.d, inst.horizon, inst.eta,
                                                     inst.epsilon, inst.seed);
        built.hard_optimal_actions = hard.optimal_actions;
        offline_eta = hard.eta; // the attack must mirror the instance rows
        if (mcs.generator == "structured")
            built.model_class = make_structured_class_offline(hard, mcs.cap);
        else if (mcs.generator == "perturbations-of-true")
            built.model_class = make_model_class_random(hard.mdp, mcs.count,
                                                        mcs.clamp, mcs.seed,
                                                        mcs.magnitude);
        else
            built.model_class = load_model_class_json(mcs.path);
        if (config.run.behavior == "hard_instance") built.behavior = hard.behavior;
    } else {
        EpisodicMdp base;
        if (inst.generator == "random")
            base = make_random_mdp(inst.num_states, inst.num_actions, inst.horizon,
                                   inst.seed);
        else
            base = load_instance_json(inst.path);
        if (mcs.generator == "structured")
            throw ConfigError("structured model classes need a hard instance");
        if (mcs.generator == "perturbations-of-true")
            built.model_class = make_model_class_random(base, mcs.count, mcs.clamp,
                                                        mcs.seed, mcs.magnitude);
        else
            built.model_class = load_model_class_json(mcs.path);
        if (config.run.behavior == "hard_instance")
            throw ConfigError("behavior = hard_instance needs an offline_hard instance");
    }
    if (built.behavior.probs.empty())
        built.behavior = uniform_behavior(built.model_class.true_model());

    const auto& adv = config.adversary;
    built.adversary_budget = adv.budget;
    const EpisodicMdp& true_model = built.model_class.true_model();
    if (adv.strategy == "null") {
        built.make_adversary = [](uint64_t) { return make_null_adversary(); };
    } else if (adv.strategy == "online_lower_bound") {
        if (built.hard_optimal_actions.empty())
            throw ConfigError("online_lower_bound adversary needs a hard instance");
        built.make_adversary = [d = true_model.num_actions, H = true_model.horizon,
                                budget = adv.budget,
                                actions = built.hard_optimal_actions](uint64_t) {
            return make_online_lower_bound_adversary(d, H, budget, actions);
        };
    } else if (adv.strategy == "offline_lower_bound") {
        if (built.hard_optimal_actions.empty())
            throw ConfigError("offline_lower_bound adversary needs a hard instance");
        // budget 0 keeps the strategy unbudgeted (its native form)
        const double gate = adv.budget > 0.0 ? adv.budget : -1.0;
        built.make_adversary = [d = true_model.num_actions, H = true_model.horizon,
                                eta = offline_eta, gate,
                                actions = built.hard_optimal_actions](uint64_t) {
            return make_offline_lower_bound_adversary(d, H, eta, actions, gate);
        };
    } else { // budgeted_random
        built.make_adversary = [budget = adv.budget, magnitude = adv.magnitude,
                                base_seed = adv.seed](uint64_t run_seed) {
            uint64_t s = base_seed ^ (0x9e3779b97f4a7c15ULL * (run_seed + 1));
            return make_budgeted_random_adversary(budget, magnitude,
                                                  splitmix64_next(s));
        };
    }
    return built;
}

LearnerParams resolve_params(const AlgorithmSpec& algorithm,
                             const ModelClass& model_class) {
    LearnerParams params =
        default_parameters(model_class.size(), algorithm.delta,
                           model_class.ratio_bound, algorithm.c, algorithm.known_c);
    if (algorithm.alpha) params.alpha = *algorithm.alpha;
    if (algorithm.lambda) params.lambda = *algorithm.lambda;
    if (algorithm.beta) params.beta = *algorithm.beta;
    return params;
}

// --- CSV --------------------------------------------------------------------

std::string online_run_csv(const RunRecord& record) {
    std::string out = "t,regret_inc,regret_cum,c_realized_max_stage,conf_set_size,max_sigma\n";
    for (const auto& row : record.rounds) {
        out += std::to_string(row.t);
        out += ',';
        out += format_g17(row.regret_inc);
        out += ',';
        out += format_g17(row.regret_cum);
        out += ',';
        out += format_g17(row.c_realized_max_stage);
        out += ',';
        out += std::to_string(row.conf_set_size);
        out += ',';
        out += format_g17(row.max_sigma);
        out += '\n';
    }
    return out;
}

std::string offline_run_csv(const OfflineRunRow& row) {
    std::string out =
        "t,suboptimality,c_realized_max_stage,conf_set_size,max_sigma,"
        "coverage_coeff,information_coeff\n";
    out += std::to_string(row.num_episodes);
    out += ',';
    out += format_g17(row.suboptimality);
    out += ',';
    out += format_g17(row.c_realized_max_stage);
    out += ',';
    out += std::to_string(row.conf_set_size);
    out += ',';
    out += format_g17(row.max_sigma);
    out += ',';
    out += row.coverage < 0.0 ? "NA" : format_g17(row.coverage);
    out += ',';
    out += row.info_coeff < 0.0 ? "NA" : format_g17(row.info_coeff);
    out += '\n';
    return out;
}

// --- run / measure ----------------------------------------------------------

namespace {

struct CellResult {
    std::string csv;
    std::vector<double> regret_cum; // online: per round
    double suboptimality = 0.0;     // offline
    double realized_c = 0.0;
    LearnerParams params;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x;
    out.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

CellResult run_cell(const ExperimentConfig& config, const BuiltExperiment& built,
                    const std::string& algo, uint64_t seed,
                    bool exhaustive_policies) {
    CellResult cell;
    LearnerParams params = resolve_params(config.algorithm, built.model_class);
    if (algo == "omle_unweighted") params.unit_weights = true;
    cell.params = params;

    auto adversary = built.make_adversary(seed);
    if (algo == "cr_pmle") {
        const auto dataset =
            generate_offline_dataset(built.model_class.true_model(), built.behavior,
                                     *adversary, config.run.num_episodes, seed);
        FitOptions fit_options;
        fit_options.exhaustive_policies =
            exhaustive_policies || config.algorithm.exhaustive_policies;
        const auto fit = fit_offline(dataset, built.model_class, params, fit_options);
        OfflineRunRow row;
        row.num_episodes = dataset.size();
        row.suboptimality =
            evaluate_suboptimality(fit.policy, built.model_class.true_model());
        row.c_realized_max_stage = ledger_summary(dataset.ledger).max_over_stages;
        row.conf_set_size = static_cast<int>(fit.confidence_set.size());
        for (const auto& per_h : fit.weights.sigma)
            for (double s : per_h) row.max_sigma = std::max(row.max_sigma, s);
        if (config.run.measure_coverage)
            row.coverage = coverage_coefficient(built.model_class,
                                                dataset.pairs_per_stage());
        if (config.run.measure_ic) {
            const Policy opt = greedy_policy(built.model_class.true_model());
            row.info_coeff = information_coefficient(
                built.model_class, fit.confidence_set, fit.weights,
                dataset.pairs_per_stage(), built.model_class.true_model(), opt,
                params.lambda, params.alpha);
        }
        cell.csv = offline_run_csv(row);
        cell.suboptimality = row.suboptimality;
        cell.realized_c = row.c_realized_max_stage;
    } else {
        const RunRecord record = run_online(built.model_class, *adversary,
                                            config.run.num_episodes, params, seed);
        cell.csv = online_run_csv(record);
        cell.regret_cum.reserve(record.rounds.size());
        for (const auto& row : record.rounds) cell.regret_cum.push_back(row.regret_cum);
        cell.realized_c = record.rounds.empty()
                              ? 0.0
                              : record.rounds.back().c_realized_max_stage;
    }
    return cell;
}

} // namespace

void run_experiment(const ExperimentConfig& config, const HarnessOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const BuiltExperiment built = build_experiment(config);
    const std::string out_dir =
        options.out_override.empty() ? config.run.out : options.out_override;

    struct Cell {
        std::string algo;
        uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& algo : config.algorithm.names)
        for (uint64_t seed : config.run.seeds) cells.push_back({algo, seed});

    std::vector<CellResult> results(cells.size());
    parallel_for(static_cast<long>(cells.size()), options.jobs, [&](long i) {
        results[i] = run_cell(config, built, cells[i].algo, cells[i].seed,
                              options.exhaustive_policies);
    });

    // All cells succeeded; only now touch the filesystem.
    json summary;
    summary["schema_version"] = 1;
    summary["config"] = config_to_text(config);
    summary["model_class_size"] = built.model_class.size();
    summary["ratio_bound"] = built.model_class.ratio_bound;
    summary["runs"] = json::array();

    for (size_t i = 0; i < cells.size(); ++i) {
        const std::string run_path = out_dir + "/run_" + cells[i].algo + "_" +
                                     std::to_string(cells[i].seed) + ".csv";
        write_file_atomic(run_path, results[i].csv);
        json run;
        run["algorithm"] = cells[i].algo;
        run["seed"] = cells[i].seed;
        run["realized_c_max_stage"] = results[i].realized_c;
        run["alpha"] = std::isinf(results[i].params.alpha)
                           ? json("inf")
                           : json(results[i].params.alpha);
        run["lambda"] = results[i].params.lambda;
        run["beta"] = results[i].params.beta;
        if (cells[i].algo == "cr_pmle")
            run["suboptimality"] = results[i].suboptimality;
        else
            run["final_regret"] = results[i].regret_cum.empty()
                                      ? 0.0
                                      : results[i].regret_cum.back();
        summary["runs"].push_back(run);
    }

    for (const auto& algo : config.algorithm.names) {
        std::string agg;
        if (algo == "cr_pmle") {
            std::vector<double> subopts;
            for (size_t i = 0; i < cells.size(); ++i)
                if (cells[i].algo == algo) subopts.push_back(results[i].suboptimality);
            const auto ms = mean_stderr(subopts);
            agg = "episodes,suboptimality_mean,suboptimality_stderr\n";
            agg += std::to_string(config.run.num_episodes) + "," +
                   format_g17(ms.mean) + "," + format_g17(ms.stderr_) + "\n";
        } else {
            agg = "t,regret_cum_mean,regret_cum_stderr\n";
            for (long t = 0; t < config.run.num_episodes; ++t) {
                std::vector<double> at_t;
                for (size_t i = 0; i < cells.size(); ++i)
                    if (cells[i].algo == algo) at_t.push_back(results[i].regret_cum[t]);
                const auto ms = mean_stderr(at_t);
                agg += std::to_string(t + 1) + "," + format_g17(ms.mean) + "," +
                       format_g17(ms.stderr_) + "\n";
            }
        }
        write_file_atomic(out_dir + "/aggregate_" + algo + ".csv", agg);
    }

    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    summary["wall_time_seconds"] = elapsed;
    write_file_atomic(out_dir + "/summary.json", summary.dump(2) + "\n");
}

void measure_complexity(const ExperimentConfig& config,
                        const HarnessOptions& options) {
    const BuiltExperiment built = build_experiment(config);
    const std::string out_dir =
        options.out_override.empty() ? config.run.out : options.out_override;
    const ModelClass& mc = built.model_class;
    const EpisodicMdp& true_model = mc.true_model();
    const int S = true_model.num_states, A = true_model.num_actions;

    json report;
    report["model_class_size"] = mc.size();
    report["ratio_bound"] = mc.ratio_bound;
    report["eps_grid"] = config.measure.eps;
    report["dataset_seed"] = config.measure.seed;
    report["instance_seed"] = config.instance.seed;
    if (mc.size() < 2) {
        report["degenerate"] = true;
        report["eluder"] = json::array();
        write_file_atomic(out_dir + "/complexity.json", report.dump(2) + "\n");
        return;
    }
    report["degenerate"] = false;

    std::vector<StatePair> candidates;
    for (int x = 0; x < S; ++x)
        for (int a = 0; a < A; ++a) candidates.emplace_back(x, a);

    report["eluder"] = json::array();
    for (double eps : config.measure.eps) {
        json entry;
        entry["eps"] = eps;
        int greedy = 0, exact = -1;
        for (int h = 0; h < true_model.horizon; ++h) {
            greedy = std::max(greedy,
                              eluder_dimension_greedy(mc, candidates, h, eps));
            if (S * A <= 10)
                exact = std::max(exact,
                                 eluder_dimension_exact(mc, candidates, h, eps));
        }
        entry["greedy_estimate"] = greedy;
        if (exact >= 0) entry["exact_estimate"] = exact;
        entry["tabular_bound"] =
            48.0 * S * A * std::log(1.0 + 8.0 * S * A / (eps * eps));
        entry["linear_bound_d_equals_sa"] =
            48.0 * S * A * std::log(1.0 + 8.0 * S * A / (eps * eps));
        report["eluder"].push_back(entry);
    }

    auto adversary = built.make_adversary(config.measure.seed);
    const auto dataset =
        generate_offline_dataset(true_model, built.behavior, *adversary,
                                 config.measure.dataset_episodes,
                                 config.measure.seed);
    report["dataset_episodes"] = dataset.size();
    report["realized_c_max_stage"] = ledger_summary(dataset.ledger).max_over_stages;
    try {
        report["coverage_coefficient"] =
            coverage_coefficient(mc, dataset.pairs_per_stage());
    } catch (const AllPairsIdentical&) {
        report["coverage_coefficient"] = nullptr;
    }

    LearnerParams params = resolve_params(config.algorithm, mc);
    const auto fit = fit_offline(dataset, mc, params);
    const Policy opt = greedy_policy(true_model);
    report["information_coefficient"] = information_coefficient(
        mc, fit.confidence_set, fit.weights, dataset.pairs_per_stage(), true_model,
        opt, params.lambda, params.alpha);
    report["confidence_set_size"] = fit.confidence_set.size();

    write_file_atomic(out_dir + "/complexity.json", report.dump(2) + "\n");
}

} // namespace corrl
