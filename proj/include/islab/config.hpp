#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace islab {

/// Raised for unreadable or invalid configuration files (exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Parsed `key = value` lines; '#' starts a comment. Keys keep their dotted section prefixes.
struct RawConfig {
    std::map<std::string, std::string> values;
    /// line number of each key, for diagnostics
    std::map<std::string, int> lines;
};

RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::string& path);

/// Configuration with every key of the selected suite resolved to a typed value (defaults filled in).
class ExperimentConfig {
public:
    const std::string& suite() const { return suite_; }
    std::uint64_t seed() const { return seed_; }
    int threads() const { return threads_; }
    const std::string& output() const { return output_; }
    void set_seed(std::uint64_t s);
    void set_threads(int t);
    void set_output(std::string o);

    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<int> int_list(const std::string& key) const;

    /// canonical string form of every resolved key, sorted by key
    const std::map<std::string, std::string>& resolved() const { return canonical_; }

private:
    friend std::vector<std::string> resolve_config(const RawConfig&, ExperimentConfig*);
    std::string suite_;
    std::uint64_t seed_ = 1;
    int threads_ = 1;
    std::string output_ = "out";
    std::map<std::string, std::string> canonical_;
};

const std::vector<std::string>& suite_names();

/// Resolves and validates; returns the list of violations (empty iff `run` would accept the config).
std::vector<std::string> resolve_config(const RawConfig& raw, ExperimentConfig* out);

/// Throws ConfigError with all violations.
ExperimentConfig resolve_or_throw(const RawConfig& raw);

}  // namespace islab
