#pragma once

// Simulation config: a flat JSON object with exactly these keys
//   n, structure, hamiltonian, initial, dt, steps, method, output_prefix, emit_plot
// All validation problems are collected and reported together.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkham/dynamics.hpp"
#include "qkham/expression.hpp"
#include "qkham/structures.hpp"

namespace qkham {

struct SimulationConfig {
    int n = 1;
    Label structure = Label::F;
    std::string hamiltonian;
    Vector initial;
    double dt = 0.0;
    std::size_t steps = 0;
    Method method = Method::Rk4;
    std::string output_prefix;
    bool emit_plot = false;
};

class ConfigError : public std::runtime_error {
public:
    enum class Kind { FileNotFound, MalformedJson, Schema, Expression };

    struct Issue {
        std::string field;
        std::string message;
    };

    ConfigError(Kind kind, std::vector<Issue> issues)
        : std::runtime_error(render(kind, issues)), kind_(kind), issues_(std::move(issues)) {}

    Kind kind() const noexcept { return kind_; }
    const std::vector<Issue>& issues() const noexcept { return issues_; }

    bool mentions(std::string_view field) const {
        for (const auto& i : issues_)
            if (i.field == field) return true;
        return false;
    }

private:
    static std::string render(Kind kind, const std::vector<Issue>& issues) {
        std::string head;
        switch (kind) {
            case Kind::FileNotFound: head = "config file error"; break;
            case Kind::MalformedJson: head = "malformed JSON"; break;
            case Kind::Schema: head = "config schema violation"; break;
            case Kind::Expression: head = "hamiltonian expression error"; break;
        }
        std::string out = head;
        for (const auto& i : issues) out += "\n  " + (i.field.empty() ? std::string("<config>") : i.field) + ": " + i.message;
        return out;
    }

    Kind kind_;
    std::vector<Issue> issues_;
};

inline constexpr std::string_view kConfigKeys[] = {"n",     "structure", "hamiltonian",   "initial",  "dt",
                                                   "steps", "method",    "output_prefix", "emit_plot"};

inline SimulationConfig config_from_json(const nlohmann::json& doc) {
    using Issue = ConfigError::Issue;
    std::vector<Issue> schema;
    std::vector<Issue> expression;

    if (!doc.is_object()) throw ConfigError(ConfigError::Kind::Schema, {{"", "top level must be a JSON object"}});

    for (const auto& [key, _] : doc.items()) {
        bool known = false;
        for (auto k : kConfigKeys) known = known || key == k;
        if (!known) schema.push_back({key, "unknown key"});
    }
    for (auto k : kConfigKeys)
        if (!doc.contains(std::string(k))) schema.push_back({std::string(k), "missing required key"});

    SimulationConfig cfg;
    bool n_ok = false;
    if (doc.contains("n")) {
        const auto& v = doc["n"];
        if (v.is_number_integer() && v.get<long long>() >= 1 && v.get<long long>() <= 1 << 20) {
            cfg.n = v.get<int>();
            n_ok = true;
        } else {
            schema.push_back({"n", "must be a positive integer"});
        }
    }
    if (doc.contains("structure")) {
        const auto& v = doc["structure"];
        if (v.is_string() && (v == "F" || v == "G" || v == "H"))
            cfg.structure = parse_label(v.get<std::string>());
        else
            schema.push_back({"structure", "must be one of \"F\", \"G\", \"H\""});
    }
    if (doc.contains("initial")) {
        const auto& v = doc["initial"];
        bool ok = v.is_array();
        if (ok)
            for (const auto& e : v) ok = ok && e.is_number() && std::isfinite(e.get<double>());
        if (!ok) {
            schema.push_back({"initial", "must be an array of finite numbers"});
        } else {
            cfg.initial = v.get<Vector>();
            if (n_ok && cfg.initial.size() != 4 * static_cast<std::size_t>(cfg.n))
                schema.push_back({"initial", "length must be 4n = " + std::to_string(4 * cfg.n) + ", got " +
                                                 std::to_string(cfg.initial.size())});
        }
    }
    if (doc.contains("dt")) {
        const auto& v = doc["dt"];
        if (v.is_number() && std::isfinite(v.get<double>()) && v.get<double>() > 0.0)
            cfg.dt = v.get<double>();
        else
            schema.push_back({"dt", "must be a finite number > 0"});
    }
    if (doc.contains("steps")) {
        const auto& v = doc["steps"];
        if (v.is_number_integer() && v.get<long long>() >= 1)
            cfg.steps = v.get<std::size_t>();
        else
            schema.push_back({"steps", "must be an integer >= 1"});
    }
    if (doc.contains("method")) {
        const auto& v = doc["method"];
        if (v.is_string() && (v == "rk4" || v == "implicit_midpoint"))
            cfg.method = parse_method(v.get<std::string>());
        else
            schema.push_back({"method", "must be one of \"rk4\", \"implicit_midpoint\""});
    }
    if (doc.contains("output_prefix")) {
        const auto& v = doc["output_prefix"];
        if (v.is_string() && !v.get<std::string>().empty())
            cfg.output_prefix = v.get<std::string>();
        else
            schema.push_back({"output_prefix", "must be a non-empty string"});
    }
    if (doc.contains("emit_plot")) {
        const auto& v = doc["emit_plot"];
        if (v.is_boolean())
            cfg.emit_plot = v.get<bool>();
        else
            schema.push_back({"emit_plot", "must be a boolean"});
    }
    if (doc.contains("hamiltonian")) {
        const auto& v = doc["hamiltonian"];
        if (!v.is_string() || v.get<std::string>().empty()) {
            schema.push_back({"hamiltonian", "must be a non-empty expression string"});
        } else {
            cfg.hamiltonian = v.get<std::string>();
            if (n_ok) {
                try {
                    (void)parse(cfg.hamiltonian, BlockDim(cfg.n));
                } catch (const ParseError& e) {
                    expression.push_back({"hamiltonian", e.what()});
                }
            }
        }
    }

    if (!schema.empty()) {
        schema.insert(schema.end(), expression.begin(), expression.end());
        throw ConfigError(ConfigError::Kind::Schema, std::move(schema));
    }
    if (!expression.empty()) throw ConfigError(ConfigError::Kind::Expression, std::move(expression));
    return cfg;
}

inline SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigError::Kind::FileNotFound, {{"", "cannot open '" + path.string() + "'"}});
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(ConfigError::Kind::MalformedJson, {{"", e.what()}});
    }
    return config_from_json(doc);
}

inline nlohmann::ordered_json config_to_json(const SimulationConfig& cfg) {
    nlohmann::ordered_json j;
    j["n"] = cfg.n;
    j["structure"] = std::string(to_string(cfg.structure));
    j["hamiltonian"] = cfg.hamiltonian;
    j["initial"] = cfg.initial;
    j["dt"] = cfg.dt;
    j["steps"] = cfg.steps;
    j["method"] = std::string(to_string(cfg.method));
    j["output_prefix"] = cfg.output_prefix;
    j["emit_plot"] = cfg.emit_plot;
    return j;
}

}  // namespace qkham
