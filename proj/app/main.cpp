#include "islab/config.hpp"
#include "islab/suites.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

namespace {

constexpr int kPass = 0;
constexpr int kNumericFailure = 1;
constexpr int kConfigError = 2;

void print_problems(const std::vector<std::string>& problems) {
    for (const auto& p : problems) std::cerr << "config error: " << p << '\n';
}

int cmd_validate(const std::string& path) {
    try {
        const auto raw = islab::load_config_file(path);
        const auto problems = islab::resolve_config(raw, nullptr);
        if (!problems.empty()) {
            print_problems(problems);
            return kConfigError;
        }
    } catch (const islab::ConfigError& e) {
        print_problems(e.problems());
        return kConfigError;
    }
    std::cout << "valid: " << path << '\n';
    return kPass;
}

int cmd_run(const std::string& path, const std::string& out, const std::string& seed, int threads) {
    islab::ExperimentConfig cfg;
    try {
        cfg = islab::resolve_or_throw(islab::load_config_file(path));
        if (!out.empty()) cfg.set_output(out);
        if (!seed.empty()) {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(seed, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != seed.size() || seed.front() == '-') throw islab::ConfigError({"--seed expects an unsigned 64-bit integer"});
            cfg.set_seed(v);
        }
        if (threads > 0) cfg.set_threads(threads);
    } catch (const islab::ConfigError& e) {
        print_problems(e.problems());
        return kConfigError;
    }

    islab::RunReport rep;
    try {
        rep = islab::run_suite(cfg);
    } catch (const islab::ConfigError& e) {
        print_problems(e.problems());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
    for (const auto& c : rep.checks)
        std::printf("[%s] %s: %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(), c.tolerance);
    std::printf("suite %s: %s (%zu checks, %.2f s) -> %s\n", rep.suite.c_str(), rep.passed() ? "pass" : "FAIL",
                rep.checks.size(), rep.wall_clock_seconds, cfg.output().c_str());
    return rep.passed() ? kPass : kNumericFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"islab: numerical experiments on symplectic maps with islands and links"};
    app.require_subcommand(1);

    std::string run_path, out, seed;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run the suite named in a config file");
    run->add_option("config", run_path, "config file")->required();
    run->add_option("--out", out, "output directory (overrides `output`)");
    run->add_option("--seed", seed, "random seed (unsigned 64-bit)");
    run->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config file without running it");
    validate->add_option("config", validate_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }
    if (*run) return cmd_run(run_path, out, seed, threads);
    return cmd_validate(validate_path);
}
