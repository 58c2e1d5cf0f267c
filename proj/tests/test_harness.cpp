#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corrl/harness.hpp"

using namespace corrl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("corrl_test_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig pinned_config(const std::string& out) {
    std::string text = R"([instance]
generator = online_hard
d = 2
horizon = 3
seed = 42

[model_class]
generator = structured
cap = 8

[algorithm]
name = cr_omle
delta = 0.05
known_c = true
c = 4.0

[adversary]
strategy = online_lower_bound
budget = 4.0

[run]
episodes = 12
seeds = 3,4
)";
    text += "out = " + out + "\n";
    return parse_config_text(text, "pinned.cfg");
}

} // namespace

TEST_CASE("gen/load instance and model class round-trip") {
    const auto dir = fresh_dir("io");
    const auto base = make_random_mdp(3, 2, 3, 5000);
    save_instance_json((dir / "instance.json").string(), base);
    const auto loaded = load_instance_json((dir / "instance.json").string());
    CHECK(loaded.transitions == base.transitions);
    CHECK(loaded.rewards == base.rewards);
    CHECK(loaded.initial_state == base.initial_state);

    const auto mc = make_model_class_random(base, 3, 1e-3, 5001);
    save_model_class_json((dir / "mc.json").string(), mc);
    const auto mc_loaded = load_model_class_json((dir / "mc.json").string());
    CHECK(mc_loaded.size() == 3);
    CHECK(mc_loaded.true_index == 0);
    CHECK(mc_loaded.ratio_bound == doctest::Approx(mc.ratio_bound).epsilon(1e-12));
    CHECK(mc_loaded.models[2].transitions == mc.models[2].transitions);
}

TEST_CASE("float formatting uses 17 significant digits") {
    CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_g17(1.0) == "1");
    CHECK(format_g17(0.5) == "0.5");
}

TEST_CASE("minimal run produces the three outputs") {
    const auto dir = fresh_dir("minimal");
    ExperimentConfig cfg = parse_config_text(R"([instance]
generator = online_hard
d = 2
horizon = 3
seed = 1

[model_class]
generator = structured
cap = 4

[algorithm]
name = cr_omle
c = 0

[adversary]
strategy = null

[run]
episodes = 1
seeds = 9
out = unused
)",
                                             "minimal.cfg");
    HarnessOptions options;
    options.out_override = dir.string();
    run_experiment(cfg, options);

    const std::string run_csv = slurp(dir / "run_cr_omle_9.csv");
    CHECK(run_csv.rfind("t,regret_inc,regret_cum,c_realized_max_stage,conf_set_size,max_sigma\n",
                        0) == 0);
    CHECK(std::count(run_csv.begin(), run_csv.end(), '\n') == 2); // header + 1 round

    const std::string agg = slurp(dir / "aggregate_cr_omle.csv");
    CHECK(agg.rfind("t,regret_cum_mean,regret_cum_stderr\n", 0) == 0);

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("schema_version") == 1);
    CHECK(summary.at("runs").size() == 1);
    CHECK(summary.at("runs")[0].at("algorithm") == "cr_omle");
    CHECK(summary.contains("wall_time_seconds"));
}

TEST_CASE("reruns and thread counts reproduce per-run bytes") {
    const auto dir1 = fresh_dir("repro1");
    const auto dir2 = fresh_dir("repro2");
    const auto dir3 = fresh_dir("repro3");

    HarnessOptions serial;
    serial.jobs = 1;
    HarnessOptions parallel;
    parallel.jobs = 8;

    run_experiment(pinned_config(dir1.string()), serial);
    run_experiment(pinned_config(dir2.string()), serial);
    run_experiment(pinned_config(dir3.string()), parallel);

    for (const char* name : {"run_cr_omle_3.csv", "run_cr_omle_4.csv",
                             "aggregate_cr_omle.csv"}) {
        const std::string a = slurp(dir1 / name);
        CHECK(a == slurp(dir2 / name));
        CHECK(a == slurp(dir3 / name));
    }
}

TEST_CASE("aggregate means equal hand-averaged run columns") {
    const auto dir = fresh_dir("agg");
    run_experiment(pinned_config(dir.string()), {});

    auto read_regret_cum = [&](const char* name) {
        std::vector<double> out;
        std::istringstream in(slurp(dir / name));
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            const auto first = line.find(',');
            const auto second = line.find(',', first + 1);
            const auto third = line.find(',', second + 1);
            out.push_back(std::stod(line.substr(second + 1, third - second - 1)));
        }
        return out;
    };
    const auto a = read_regret_cum("run_cr_omle_3.csv");
    const auto b = read_regret_cum("run_cr_omle_4.csv");

    std::istringstream agg(slurp(dir / "aggregate_cr_omle.csv"));
    std::string line;
    std::getline(agg, line);
    for (size_t t = 0; t < a.size(); ++t) {
        REQUIRE(std::getline(agg, line));
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        const double mean = std::stod(line.substr(first + 1, second - first - 1));
        CHECK(mean == doctest::Approx((a[t] + b[t]) / 2.0).epsilon(1e-15));
    }
}

TEST_CASE("golden per-run csv is stable") {
    const auto dir = fresh_dir("golden");
    run_experiment(pinned_config(dir.string()), {});
    const fs::path golden = fs::path(CORRL_TEST_DATA_DIR) / "golden_run.csv";
    CHECK(slurp(dir / "run_cr_omle_3.csv") == slurp(golden));
}

TEST_CASE("offline run writes the offline schema") {
    const auto dir = fresh_dir("offline");
    ExperimentConfig cfg = parse_config_text(R"([instance]
generator = offline_hard
d = 4
horizon = 3
eta = 0.1
epsilon = 0.4
seed = 2

[model_class]
generator = structured
cap = 8

[algorithm]
name = cr_pmle
c = 0

[adversary]
strategy = null

[run]
episodes = 60
seeds = 5
behavior = hard_instance
measure_coverage = true
out = unused
)",
                                             "offline.cfg");
    HarnessOptions options;
    options.out_override = dir.string();
    run_experiment(cfg, options);

    const std::string run_csv = slurp(dir / "run_cr_pmle_5.csv");
    CHECK(run_csv.rfind("t,suboptimality,c_realized_max_stage,conf_set_size,max_sigma,"
                        "coverage_coeff,information_coeff\n",
                        0) == 0);
    CHECK(run_csv.find(",NA\n") != std::string::npos); // ic not requested

    const std::string agg = slurp(dir / "aggregate_cr_pmle.csv");
    CHECK(agg.rfind("episodes,suboptimality_mean,suboptimality_stderr\n", 0) == 0);
}

TEST_CASE("measure writes a complexity report") {
    const auto dir = fresh_dir("measure");
    ExperimentConfig cfg = parse_config_text(R"([instance]
generator = random
num_states = 2
num_actions = 2
horizon = 2
seed = 3

[model_class]
generator = perturbations-of-true
count = 4
seed = 4

[algorithm]
name = cr_pmle
c = 1.0

[adversary]
strategy = null

[run]
episodes = 1
seeds = 1
out = unused

[measure]
eps = 0.05,0.1,0.2
episodes = 80
seed = 6
)",
                                             "measure.cfg");
    HarnessOptions options;
    options.out_override = dir.string();
    measure_complexity(cfg, options);

    const auto report = nlohmann::json::parse(slurp(dir / "complexity.json"));
    CHECK(report.at("degenerate") == false);
    CHECK(report.at("eluder").size() == 3);
    for (const auto& entry : report.at("eluder")) {
        CHECK(entry.at("greedy_estimate").get<int>() <=
              entry.at("tabular_bound").get<double>());
        CHECK(entry.contains("exact_estimate")); // SA = 4 <= 10
        CHECK(entry.at("greedy_estimate").get<int>() <=
              entry.at("exact_estimate").get<int>());
    }
    CHECK(report.contains("coverage_coefficient"));
    CHECK(report.contains("information_coefficient"));
    CHECK(report.at("eps_grid").size() == 3);

    // singleton class degenerates
    const auto dir2 = fresh_dir("measure_solo");
    cfg.model_class.count = 1;
    options.out_override = dir2.string();
    measure_complexity(cfg, options);
    const auto solo = nlohmann::json::parse(slurp(dir2 / "complexity.json"));
    CHECK(solo.at("degenerate") == true);
}
