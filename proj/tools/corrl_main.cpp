#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "corrl/harness.hpp"

namespace {

int jobs_from_env(int cli_jobs) {
    if (const char* env = std::getenv("CORRL_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0 && cli_jobs <= 1) return v;
    }
    return cli_jobs;
}

std::string out_from_env(const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("CORRL_OUT")) return env;
    return "";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corrl: corruption-robust model-based RL testbed"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    bool exhaustive = false;

    auto add_common = [&](CLI::App* sub, bool needs_out_file) {
        sub->add_option("--config", config_path, "experiment config file")
            ->required();
        sub->add_option("--jobs", jobs, "worker threads for independent runs");
        sub->add_option("--out", out_dir,
                        needs_out_file ? "output file path" : "output directory");
        return sub;
    };

    auto* run_cmd = add_common(app.add_subcommand("run", "execute all (seed x algorithm) cells"), false);
    run_cmd->add_flag("--exhaustive-policies", exhaustive,
                      "enumerate all deterministic policies in the offline max-min");
    add_common(app.add_subcommand("measure",
                                  "eluder/coverage/information-coefficient report"),
               false);
    auto* gen_cmd = add_common(
        app.add_subcommand("gen-instance", "write the configured instance as JSON"),
        true);
    std::string model_class_out;
    gen_cmd->add_option("--model-class-out", model_class_out,
                        "also write the generated model class as JSON");
    app.add_subcommand("validate-config", "parse and validate a config file")
        ->add_option("--config", config_path, "experiment config file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        corrl::ExperimentConfig config = corrl::parse_config_file(config_path);
        corrl::HarnessOptions options;
        options.jobs = jobs_from_env(jobs);
        options.out_override = out_from_env(out_dir);
        options.exhaustive_policies = exhaustive;

        if (app.got_subcommand("validate-config")) {
            corrl::build_experiment(config); // resolve every referenced name
            std::cout << "ok\n";
            return 0;
        }
        if (app.got_subcommand("run")) {
            corrl::run_experiment(config, options);
            return 0;
        }
        if (app.got_subcommand("measure")) {
            corrl::measure_complexity(config, options);
            return 0;
        }
        // gen-instance
        const corrl::BuiltExperiment built = corrl::build_experiment(config);
        const std::string path = !options.out_override.empty()
                                     ? options.out_override
                                     : "instance.json";
        corrl::save_instance_json(path, built.model_class.true_model());
        if (!model_class_out.empty())
            corrl::save_model_class_json(model_class_out, built.model_class);
        std::cout << path << "\n";
        return 0;
    } catch (const corrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
