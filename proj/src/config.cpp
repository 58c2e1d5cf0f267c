#include "corrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace corrl {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Parser {
    const std::string& diag;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(diag + ":" + std::to_string(line) + ": " + msg);
    }

    double number(const std::string& v) const {
        try {
            size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) fail("trailing characters in number '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
    }

    long integer(const std::string& v) const {
        const double x = number(v);
        const long i = static_cast<long>(x);
        if (static_cast<double>(i) != x) fail("expected an integer, got '" + v + "'");
        return i;
    }

    uint64_t unsigned64(const std::string& v) const {
        try {
            size_t pos = 0;
            const uint64_t x = std::stoull(v, &pos);
            if (pos != v.size()) fail("trailing characters in seed '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("expected an unsigned integer, got '" + v + "'");
        }
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail("expected a boolean, got '" + v + "'");
    }

    std::vector<std::string> list(const std::string& v) const {
        std::vector<std::string> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list element");
            out.push_back(item);
        }
        if (out.empty()) fail("empty list");
        return out;
    }
};

void check_name(const Parser& p, const std::string& value,
                std::initializer_list<const char*> allowed, const char* what) {
    for (const char* name : allowed)
        if (value == name) return;
    std::string msg = std::string("unknown ") + what + " '" + value + "' (expected ";
    bool first = true;
    for (const char* name : allowed) {
        if (!first) msg += "|";
        msg += name;
        first = false;
    }
    p.fail(msg + ")");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& diag_name) {
    ExperimentConfig cfg;
    Parser p{diag_name};
    std::string section;
    std::istringstream stream(text);
    std::string raw;

    while (std::getline(stream, raw)) {
        ++p.line;
        std::string line = raw;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "instance" && section != "model_class" &&
                section != "algorithm" && section != "adversary" &&
                section != "run" && section != "measure")
                p.fail("unknown section [" + section + "]");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("empty value for '" + key + "'");
        if (section.empty()) p.fail("key '" + key + "' outside any section");

        if (section == "instance") {
            if (key == "generator") cfg.instance.generator = value;
            else if (key == "d") cfg.instance.d = static_cast<int>(p.integer(value));
            else if (key == "horizon") cfg.instance.horizon = static_cast<int>(p.integer(value));
            else if (key == "num_states") cfg.instance.num_states = static_cast<int>(p.integer(value));
            else if (key == "num_actions") cfg.instance.num_actions = static_cast<int>(p.integer(value));
            else if (key == "eta") cfg.instance.eta = p.number(value);
            else if (key == "epsilon") cfg.instance.epsilon = p.number(value);
            else if (key == "seed") cfg.instance.seed = p.unsigned64(value);
            else if (key == "path") cfg.instance.path = value;
            else p.fail("unknown key '" + key + "' in [instance]");
        } else if (section == "model_class") {
            if (key == "generator") cfg.model_class.generator = value;
            else if (key == "count") cfg.model_class.count = static_cast<int>(p.integer(value));
            else if (key == "cap") cfg.model_class.cap = static_cast<int>(p.integer(value));
            else if (key == "clamp") cfg.model_class.clamp = p.number(value);
            else if (key == "magnitude") cfg.model_class.magnitude = p.number(value);
            else if (key == "seed") cfg.model_class.seed = p.unsigned64(value);
            else if (key == "path") cfg.model_class.path = value;
            else p.fail("unknown key '" + key + "' in [model_class]");
        } else if (section == "algorithm") {
            if (key == "name" || key == "names") {
                cfg.algorithm.names = p.list(value);
                for (const auto& n : cfg.algorithm.names)
                    check_name(p, n, {"cr_omle", "omle_unweighted", "cr_pmle"},
                               "algorithm");
            } else if (key == "delta") cfg.algorithm.delta = p.number(value);
            else if (key == "known_c") cfg.algorithm.known_c = p.boolean(value);
            else if (key == "c") cfg.algorithm.c = p.number(value);
            else if (key == "alpha") cfg.algorithm.alpha = p.number(value);
            else if (key == "lambda") cfg.algorithm.lambda = p.number(value);
            else if (key == "beta") cfg.algorithm.beta = p.number(value);
            else if (key == "exhaustive_policies")
                cfg.algorithm.exhaustive_policies = p.boolean(value);
            else p.fail("unknown key '" + key + "' in [algorithm]");
        } else if (section == "adversary") {
            if (key == "strategy") {
                check_name(p, value,
                           {"null", "online_lower_bound", "offline_lower_bound",
                            "budgeted_random"},
                           "adversary strategy");
                cfg.adversary.strategy = value;
            } else if (key == "budget") cfg.adversary.budget = p.number(value);
            else if (key == "magnitude") cfg.adversary.magnitude = p.number(value);
            else if (key == "eta") cfg.adversary.eta = p.number(value);
            else if (key == "seed") cfg.adversary.seed = p.unsigned64(value);
            else p.fail("unknown key '" + key + "' in [adversary]");
        } else if (section == "run") {
            if (key == "episodes") cfg.run.num_episodes = p.integer(value);
            else if (key == "seeds") {
                cfg.run.seeds.clear();
                for (const auto& s : p.list(value))
                    cfg.run.seeds.push_back(p.unsigned64(s));
            } else if (key == "out") cfg.run.out = value;
            else if (key == "behavior") {
                check_name(p, value, {"uniform", "hard_instance"}, "behavior policy");
                cfg.run.behavior = value;
            } else if (key == "measure_coverage")
                cfg.run.measure_coverage = p.boolean(value);
            else if (key == "measure_ic") cfg.run.measure_ic = p.boolean(value);
            else p.fail("unknown key '" + key + "' in [run]");
        } else { // measure
            if (key == "eps") {
                cfg.measure.eps.clear();
                for (const auto& s : p.list(value))
                    cfg.measure.eps.push_back(p.number(s));
            } else if (key == "episodes") cfg.measure.dataset_episodes = p.integer(value);
            else if (key == "seed") cfg.measure.seed = p.unsigned64(value);
            else p.fail("unknown key '" + key + "' in [measure]");
        }
    }

    p.line = 0;
    check_name(p, cfg.instance.generator,
               {"online_hard", "offline_hard", "random", "file"},
               "instance generator");
    check_name(p, cfg.model_class.generator,
               {"structured", "perturbations-of-true", "file"},
               "model class generator");
    if (cfg.run.num_episodes < 1) p.fail("[run] episodes must be >= 1");
    if (cfg.run.seeds.empty()) p.fail("[run] seeds must be nonempty");
    std::set<uint64_t> unique_seeds(cfg.run.seeds.begin(), cfg.run.seeds.end());
    if (unique_seeds.size() != cfg.run.seeds.size())
        p.fail("[run] seeds must be distinct");
    if (cfg.instance.generator == "file" && cfg.instance.path.empty())
        p.fail("[instance] path required for generator = file");
    if (cfg.model_class.generator == "file" && cfg.model_class.path.empty())
        p.fail("[model_class] path required for generator = file");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "[instance]\n"
        << "generator = " << c.instance.generator << "\n";
    if (c.instance.generator == "file") {
        out << "path = " << c.instance.path << "\n";
    } else if (c.instance.generator == "random") {
        out << "num_states = " << c.instance.num_states << "\n"
            << "num_actions = " << c.instance.num_actions << "\n"
            << "horizon = " << c.instance.horizon << "\n"
            << "seed = " << c.instance.seed << "\n";
    } else {
        out << "d = " << c.instance.d << "\n"
            << "horizon = " << c.instance.horizon << "\n"
            << "seed = " << c.instance.seed << "\n";
        if (c.instance.generator == "offline_hard")
            out << "eta = " << c.instance.eta << "\n"
                << "epsilon = " << c.instance.epsilon << "\n";
    }
    out << "\n[model_class]\n"
        << "generator = " << c.model_class.generator << "\n";
    if (c.model_class.generator == "file") {
        out << "path = " << c.model_class.path << "\n";
    } else if (c.model_class.generator == "structured") {
        out << "cap = " << c.model_class.cap << "\n";
    } else {
        out << "count = " << c.model_class.count << "\n"
            << "clamp = " << c.model_class.clamp << "\n"
            << "magnitude = " << c.model_class.magnitude << "\n"
            << "seed = " << c.model_class.seed << "\n";
    }
    out << "\n[algorithm]\nname = ";
    for (size_t i = 0; i < c.algorithm.names.size(); ++i)
        out << (i ? "," : "") << c.algorithm.names[i];
    out << "\ndelta = " << c.algorithm.delta << "\n"
        << "known_c = " << (c.algorithm.known_c ? "true" : "false") << "\n"
        << "c = " << c.algorithm.c << "\n";
    if (c.algorithm.alpha) out << "alpha = " << *c.algorithm.alpha << "\n";
    if (c.algorithm.lambda) out << "lambda = " << *c.algorithm.lambda << "\n";
    if (c.algorithm.beta) out << "beta = " << *c.algorithm.beta << "\n";
    if (c.algorithm.exhaustive_policies) out << "exhaustive_policies = true\n";
    out << "\n[adversary]\nstrategy = " << c.adversary.strategy << "\n";
    if (c.adversary.strategy != "null") {
        out << "budget = " << c.adversary.budget << "\n";
        if (c.adversary.strategy == "budgeted_random")
            out << "magnitude = " << c.adversary.magnitude << "\n"
                << "seed = " << c.adversary.seed << "\n";
        if (c.adversary.strategy == "offline_lower_bound")
            out << "eta = " << c.adversary.eta << "\n";
    }
    out << "\n[run]\nepisodes = " << c.run.num_episodes << "\nseeds = ";
    for (size_t i = 0; i < c.run.seeds.size(); ++i)
        out << (i ? "," : "") << c.run.seeds[i];
    out << "\nout = " << c.run.out << "\nbehavior = " << c.run.behavior << "\n"
        << "measure_coverage = " << (c.run.measure_coverage ? "true" : "false")
        << "\nmeasure_ic = " << (c.run.measure_ic ? "true" : "false") << "\n";
    return out.str();
}

} // namespace corrl
