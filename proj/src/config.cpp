#include "islab/config.hpp"

#include "islab/suites.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace islab {

namespace {

enum class Kind { Real, Int, UInt, Bool, Text, IntList };

struct KeySpec {
    std::string key;
    Kind kind;
    std::string def;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    /// strict bounds
    bool open = false;
    std::vector<std::string> choices{};
};

const double kInf = std::numeric_limits<double>::infinity();

const std::vector<KeySpec>& global_keys() {
    static const std::vector<KeySpec> keys{
        {"suite", Kind::Text, "", 0, 0, false, {"island", "lyapunov", "stdmap-scan", "links", "rescaling"}},
        {"seed", Kind::UInt, "1"},
        {"threads", Kind::Int, "1", 1, 256},
        {"output", Kind::Text, "out"},
    };
    return keys;
}

const std::map<std::string, std::vector<KeySpec>>& section_keys() {
    static const std::map<std::string, std::vector<KeySpec>> keys{
        {"island",
         {{"island.delta", Kind::Real, "0.15", 0, 0.25, true},
          {"island.epsilon", Kind::Real, "0.24", 0, 0.25, true},
          {"island.rho0", Kind::Real, "0", 0, kInf},
          {"island.samples", Kind::Int, "1000", 1, 1e7},
          {"island.grid", Kind::Int, "100", 0, 2000},
          {"island.points", Kind::Int, "10000", 0, 4e6},
          {"island.horizon", Kind::Int, "200", 1, 1e5},
          {"island.flow_steps", Kind::Int, "256", 1, 1e5}}},
        {"lyapunov",
         {{"lyapunov.map", Kind::Text, "anosov", 0, 0, false, {"anosov", "chirikov", "island"}},
          {"lyapunov.n", Kind::Int, "50", 1, 1e6},
          {"lyapunov.points", Kind::Int, "100", 1, 1e7},
          {"lyapunov.grid", Kind::Int, "50", 0, 2000},
          {"lyapunov.a", Kind::Real, "1.0", -kInf, kInf},
          {"lyapunov.delta", Kind::Real, "0.15", 0, 0.25, true},
          {"lyapunov.epsilon", Kind::Real, "0.24", 0, 0.25, true},
          {"lyapunov.cone_points", Kind::Int, "10", 0, 1e6},
          {"lyapunov.cone_steps", Kind::Int, "50", 1, 1e5}}},
        {"stdmap",
         {{"stdmap.a_min", Kind::Real, "0.1", 0, 100},
          {"stdmap.a_max", Kind::Real, "6.0", 0, 100},
          {"stdmap.a_step", Kind::Real, "0.1", 0, 100, true},
          {"stdmap.n", Kind::Int, "200", 1, 1e6},
          {"stdmap.points", Kind::Int, "64", 1, 1e6}}},
        {"links",
         {{"links.tau", Kind::Real, "1.0", 0, kInf, true},
          {"links.xa", Kind::Real, "-3.0"},
          {"links.xb", Kind::Real, "2.0"},
          {"links.y1", Kind::Real, "1.0"},
          {"links.y2", Kind::Real, "-1.0"},
          {"links.delta", Kind::Real, "0.1", 0, kInf, true},
          {"links.perturbations", Kind::Int, "10", 0, 1000},
          {"links.size", Kind::Real, "1e-3", 0, 1e-2, true},
          {"links.harmonics", Kind::Int, "3", 1, 16},
          {"links.samples", Kind::Int, "128", 16, 4096},
          {"links.tol", Kind::Real, "1e-10", 0, 1, true},
          {"links.max_iter", Kind::Int, "50", 1, 1000},
          {"links.closed_form_trials", Kind::Int, "20", 0, 1000}}},
        {"rescaling",
         {{"rescaling.configuration", Kind::Text, "nonlinear", 0, 0, false, {"affine", "nonlinear"}},
          {"rescaling.N", Kind::Int, "3", 1, 101},
          {"rescaling.lambda", Kind::Real, "0.4"},
          {"rescaling.mu", Kind::Real, "0.8"},
          {"rescaling.r", Kind::Int, "2", 1, 10},
          {"rescaling.k_list", Kind::IntList, "8,10,12,14", 1, 60},
          {"rescaling.grid", Kind::Int, "21", 3, 401},
          {"rescaling.box", Kind::Real, "0.2", 0, kInf, true},
          {"rescaling.psi_sets", Kind::Int, "5", 0, 100},
          {"rescaling.psi_amplitude", Kind::Real, "0.25", 0, 1},
          {"rescaling.corollary_points", Kind::Int, "1000", 0, 1e6}}},
    };
    return keys;
}

std::string section_of_suite(const std::string& suite) { return suite == "stdmap-scan" ? "stdmap" : suite; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double* v) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    *v = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(*v);
}

template <class T>
bool parse_integer(const std::string& s, T* v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string canonical_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// returns an error message or the canonical value
bool check_value(const KeySpec& spec, const std::string& value, std::string* canonical, std::string* error) {
    auto range = [&](double v) {
        const bool ok = spec.open ? (v > spec.lo && v < spec.hi) : (v >= spec.lo && v <= spec.hi);
        if (!ok) {
            std::ostringstream os;
            os << spec.key << " = " << value << " outside " << (spec.open ? "(" : "[") << spec.lo << ", " << spec.hi
               << (spec.open ? ")" : "]");
            *error = os.str();
        }
        return ok;
    };
    switch (spec.kind) {
        case Kind::Real: {
            double v;
            if (!parse_real(value, &v)) {
                *error = spec.key + ": expected a real number, got '" + value + "'";
                return false;
            }
            if (!range(v)) return false;
            *canonical = canonical_real(v);
            return true;
        }
        case Kind::Int: {
            long long v;
            if (!parse_integer(value, &v)) {
                *error = spec.key + ": expected an integer, got '" + value + "'";
                return false;
            }
            if (!range(static_cast<double>(v))) return false;
            *canonical = std::to_string(v);
            return true;
        }
        case Kind::UInt: {
            unsigned long long v;
            if (!parse_integer(value, &v)) {
                *error = spec.key + ": expected an unsigned 64-bit integer, got '" + value + "'";
                return false;
            }
            *canonical = std::to_string(v);
            return true;
        }
        case Kind::Bool:
            if (value != "true" && value != "false") {
                *error = spec.key + ": expected true or false, got '" + value + "'";
                return false;
            }
            *canonical = value;
            return true;
        case Kind::Text:
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
                std::string list;
                for (const auto& c : spec.choices) list += (list.empty() ? "" : ", ") + c;
                *error = spec.key + ": '" + value + "' is not one of " + list;
                return false;
            }
            if (value.empty()) {
                *error = spec.key + ": empty value";
                return false;
            }
            *canonical = value;
            return true;
        case Kind::IntList: {
            std::stringstream ss(value);
            std::string item, out;
            int count = 0;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                long long v;
                if (!parse_integer(item, &v)) {
                    *error = spec.key + ": expected a comma-separated integer list, got '" + value + "'";
                    return false;
                }
                if (!range(static_cast<double>(v))) return false;
                out += (count++ ? "," : "") + std::to_string(v);
            }
            if (count == 0) {
                *error = spec.key + ": empty list";
                return false;
            }
            *canonical = out;
            return true;
        }
    }
    return false;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(problems.empty() ? "invalid configuration" : problems.front()), problems_(std::move(problems)) {}

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::vector<std::string> problems;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(number) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        });
        if (!key_ok) {
            problems.push_back("line " + std::to_string(number) + ": malformed key '" + key + "'");
            continue;
        }
        if (raw.values.count(key)) {
            problems.push_back("line " + std::to_string(number) + ": duplicate key '" + key + "'");
            continue;
        }
        raw.values[key] = value;
        raw.lines[key] = number;
    }
    if (!problems.empty()) throw ConfigError(problems);
    return raw;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"island", "lyapunov", "stdmap-scan", "links", "rescaling"};
    return names;
}

void ExperimentConfig::set_seed(std::uint64_t s) {
    seed_ = s;
    canonical_["seed"] = std::to_string(s);
}

void ExperimentConfig::set_threads(int t) {
    if (t < 1) throw ConfigError({"threads must be >= 1"});
    threads_ = t;
    canonical_["threads"] = std::to_string(t);
}

void ExperimentConfig::set_output(std::string o) {
    output_ = std::move(o);
}

double ExperimentConfig::real(const std::string& key) const {
    double v = 0.0;
    parse_real(text(key), &v);
    return v;
}

int ExperimentConfig::integer(const std::string& key) const {
    long long v = 0;
    const auto& s = text(key);
    parse_integer(s, &v);
    return static_cast<int>(v);
}

bool ExperimentConfig::flag(const std::string& key) const { return text(key) == "true"; }

const std::string& ExperimentConfig::text(const std::string& key) const {
    auto it = canonical_.find(key);
    if (it == canonical_.end()) throw std::out_of_range("config key not resolved: " + key);
    return it->second;
}

std::vector<int> ExperimentConfig::int_list(const std::string& key) const {
    std::vector<int> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::vector<std::string> resolve_config(const RawConfig& raw, ExperimentConfig* out) {
    std::vector<std::string> problems;
    ExperimentConfig cfg;
    auto suite_it = raw.values.find("suite");
    if (suite_it == raw.values.end()) {
        problems.push_back("missing required key 'suite'");
        return problems;
    }
    std::vector<const KeySpec*> specs;
    for (const auto& k : global_keys()) specs.push_back(&k);
    const std::string& suite = suite_it->second;
    const auto& sections = section_keys();
    const std::string section = section_of_suite(suite);
    if (auto it = sections.find(section); it != sections.end())
        for (const auto& k : it->second) specs.push_back(&k);

    for (const auto& [key, value] : raw.values) {
        const bool known = std::any_of(specs.begin(), specs.end(), [&](const KeySpec* s) { return s->key == key; });
        if (known) continue;
        const auto dot = key.find('.');
        const std::string prefix = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string where = "line " + std::to_string(raw.lines.at(key)) + ": ";
        const auto sec = sections.find(prefix);
        const bool foreign = sec != sections.end() && prefix != section &&
                             std::any_of(sec->second.begin(), sec->second.end(), [&](const KeySpec& s) { return s.key == key; });
        if (foreign)
            problems.push_back(where + "key '" + key + "' belongs to another suite than '" + suite + "'");
        else
            problems.push_back(where + "unknown key '" + key + "'");
    }
    for (const KeySpec* s : specs) {
        auto it = raw.values.find(s->key);
        const std::string value = it == raw.values.end() ? s->def : it->second;
        std::string canonical, error;
        if (check_value(*s, value, &canonical, &error)) cfg.canonical_[s->key] = canonical;
        else problems.push_back(error);
    }
    if (!problems.empty()) return problems;

    cfg.suite_ = cfg.canonical_.at("suite");
    cfg.seed_ = std::stoull(cfg.canonical_.at("seed"));
    cfg.threads_ = std::stoi(cfg.canonical_.at("threads"));
    cfg.output_ = cfg.canonical_.at("output");
    // the output location is not part of the experiment; keeping it out of the echo keeps reports relocatable
    cfg.canonical_.erase("output");
    for (auto& v : suite_violations(cfg)) problems.push_back(std::move(v));
    if (problems.empty() && out) *out = cfg;
    return problems;
}

ExperimentConfig resolve_or_throw(const RawConfig& raw) {
    ExperimentConfig cfg;
    auto problems = resolve_config(raw, &cfg);
    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
}

}  // namespace islab
