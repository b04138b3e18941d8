#ifndef SIMI_IO_HPP
#define SIMI_IO_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simi/dynamics.hpp"
#include "simi/graph.hpp"
#include "simi/random.hpp"

namespace simi {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string experiment;
    GraphSpec graph{Family::Lattice, 2, 0, 0};
    OffspringSpec offspring = OffspringSpec::deterministic(2);
    std::vector<double> p_grid;  // single p == grid of size 1
    std::uint64_t trials = 1000;
    StopRule stop;
    std::uint64_t seed = 1;
    std::uint32_t parallelism = 1;  // hint only; trials are order-independent
    std::string output_dir = ".";

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void fail_key(const std::string& path, const std::string& msg) {
    throw ConfigError("config error at '" + path + "': " + msg);
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& path,
                           std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) fail_key(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

template <typename T>
T require(const nlohmann::json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail_key(path.empty() ? key : path + "." + key, "missing required key");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail_key(path.empty() ? key : path + "." + key, e.what());
    }
    return T{};  // unreachable
}

template <typename T>
T optional_field(const nlohmann::json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return require<T>(obj, path, key);
}

inline Family family_from_name(const std::string& name, const std::string& path) {
    if (name == "line") return Family::Line;
    if (name == "lattice") return Family::Lattice;
    if (name == "regular_tree") return Family::RegularTree;
    if (name == "decorated_tree") return Family::DecoratedTree;
    fail_key(path, "unknown graph family '" + name + "'");
    return Family::Line;  // unreachable
}

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Line: return "line";
        case Family::Lattice: return "lattice";
        case Family::RegularTree: return "regular_tree";
        case Family::DecoratedTree: return "decorated_tree";
    }
    return "?";
}

inline GraphSpec parse_graph(const nlohmann::json& obj, const std::string& path) {
    if (!obj.is_object()) fail_key(path, "expected an object");
    reject_unknown(obj, path, {"family", "dim", "degree", "clique"});
    GraphSpec g;
    g.family = family_from_name(require<std::string>(obj, path, "family"), path + ".family");
    g.dim = optional_field<int>(obj, path, "dim", g.family == Family::Lattice ? 2 : 0);
    g.degree = optional_field<int>(obj, path, "degree", 0);
    g.clique = optional_field<int>(obj, path, "clique", 0);
    try {
        g.validate();
    } catch (const std::exception& e) {
        fail_key(path, e.what());
    }
    return g;
}

inline OffspringSpec parse_offspring(const nlohmann::json& obj, const std::string& path) {
    if (!obj.is_object()) fail_key(path, "expected an object");
    reject_unknown(obj, path, {"kind", "value", "mean", "q", "pmf"});
    const std::string kind = require<std::string>(obj, path, "kind");
    try {
        if (kind == "deterministic")
            return OffspringSpec::deterministic(require<std::uint32_t>(obj, path, "value"));
        if (kind == "poisson") return OffspringSpec::poisson(require<double>(obj, path, "mean"));
        if (kind == "geometric") return OffspringSpec::geometric(require<double>(obj, path, "q"));
        if (kind == "finite_pmf") {
            const auto raw = require<nlohmann::json>(obj, path, "pmf");
            if (!raw.is_object()) fail_key(path + ".pmf", "expected an object of count -> mass");
            std::vector<std::pair<std::uint32_t, double>> pmf;
            for (auto it = raw.begin(); it != raw.end(); ++it) {
                std::size_t pos = 0;
                unsigned long k = 0;
                try {
                    k = std::stoul(it.key(), &pos);
                } catch (...) {
                    pos = 0;
                }
                if (pos != it.key().size())
                    fail_key(path + ".pmf." + it.key(), "key must be a non-negative integer");
                pmf.emplace_back(static_cast<std::uint32_t>(k), it.value().get<double>());
            }
            return OffspringSpec::finite_pmf(pmf);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail_key(path, e.what());
    }
    fail_key(path + ".kind", "unknown offspring kind '" + kind + "'");
    return OffspringSpec::deterministic(1);  // unreachable
}

inline StopRule parse_stop(const nlohmann::json& obj, const std::string& path) {
    if (!obj.is_object()) fail_key(path, "expected an object");
    reject_unknown(obj, path, {"max_steps", "max_parasites", "max_radius"});
    StopRule s;
    s.max_steps = optional_field<std::uint64_t>(obj, path, "max_steps", s.max_steps);
    s.max_parasites = optional_field<std::uint64_t>(obj, path, "max_parasites", s.max_parasites);
    s.max_radius = optional_field<std::uint64_t>(obj, path, "max_radius", s.max_radius);
    try {
        s.validate();
    } catch (const std::exception& e) {
        fail_key(path, e.what());
    }
    return s;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config error at '': expected a JSON object");
    detail::reject_unknown(root, "",
                           {"experiment", "graph", "offspring", "p", "p_grid", "trials", "stop",
                            "seed", "parallelism", "output_dir"});
    RunConfig cfg;
    cfg.experiment = detail::require<std::string>(root, "", "experiment");
    if (root.contains("graph")) cfg.graph = detail::parse_graph(root.at("graph"), "graph");
    if (root.contains("offspring"))
        cfg.offspring = detail::parse_offspring(root.at("offspring"), "offspring");
    if (root.contains("p") && root.contains("p_grid"))
        detail::fail_key("p", "give either 'p' or 'p_grid', not both");
    if (root.contains("p")) cfg.p_grid = {detail::require<double>(root, "", "p")};
    if (root.contains("p_grid")) cfg.p_grid = detail::require<std::vector<double>>(root, "", "p_grid");
    if (cfg.p_grid.empty()) detail::fail_key("p", "missing required key");
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i)
        if (!(cfg.p_grid[i] >= 0.0 && cfg.p_grid[i] <= 1.0))
            detail::fail_key(root.contains("p") ? "p" : "p_grid[" + std::to_string(i) + "]",
                             "value must lie in [0, 1]");
    cfg.trials = detail::optional_field<std::uint64_t>(root, "", "trials", cfg.trials);
    if (cfg.trials == 0) detail::fail_key("trials", "must be positive");
    if (root.contains("stop")) cfg.stop = detail::parse_stop(root.at("stop"), "stop");
    cfg.seed = detail::optional_field<std::uint64_t>(root, "", "seed", cfg.seed);
    cfg.parallelism = detail::optional_field<std::uint32_t>(root, "", "parallelism", cfg.parallelism);
    if (cfg.parallelism == 0) detail::fail_key("parallelism", "must be positive");
    cfg.output_dir = detail::optional_field<std::string>(root, "", "output_dir", cfg.output_dir);
    return cfg;
}

/// Canonical JSON form with all defaults made explicit; parse(emit(c)) == c.
inline nlohmann::json emit_config(const RunConfig& cfg) {
    nlohmann::json g{{"family", detail::family_name(cfg.graph.family)},
                     {"dim", cfg.graph.dim},
                     {"degree", cfg.graph.degree},
                     {"clique", cfg.graph.clique}};
    nlohmann::json off;
    switch (cfg.offspring.kind) {
        case OffspringSpec::Kind::Deterministic:
            off = {{"kind", "deterministic"},
                   {"value", static_cast<std::uint32_t>(cfg.offspring.param)}};
            break;
        case OffspringSpec::Kind::Poisson:
            off = {{"kind", "poisson"}, {"mean", cfg.offspring.param}};
            break;
        case OffspringSpec::Kind::Geometric:
            off = {{"kind", "geometric"}, {"q", cfg.offspring.param}};
            break;
        case OffspringSpec::Kind::FinitePMF: {
            nlohmann::json pmf = nlohmann::json::object();
            for (const auto& [k, w] : cfg.offspring.pmf) pmf[std::to_string(k)] = w;
            off = {{"kind", "finite_pmf"}, {"pmf", pmf}};
            break;
        }
    }
    return nlohmann::json{{"experiment", cfg.experiment},
                          {"graph", g},
                          {"offspring", off},
                          {"p_grid", cfg.p_grid},
                          {"trials", cfg.trials},
                          {"stop",
                           {{"max_steps", cfg.stop.max_steps},
                            {"max_parasites", cfg.stop.max_parasites},
                            {"max_radius", cfg.stop.max_radius}}},
                          {"seed", cfg.seed},
                          {"parallelism", cfg.parallelism},
                          {"output_dir", cfg.output_dir}};
}

/// FNV-1a over the canonical config dump; covers every semantic field.
inline std::string config_hash(const RunConfig& cfg) {
    const std::string dump = emit_config(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Trial records and summaries
// ---------------------------------------------------------------------------

/// Deterministic fields only: wallclock is deliberately left out so that a
/// rerun with the same config and seed is byte-identical.
inline nlohmann::json trial_record(const TrialOutcome& out, double p) {
    return nlohmann::json{{"trial", out.trial},
                          {"p", p},
                          {"status", status_name(out.status)},
                          {"extinction_time", out.extinction_time},
                          {"steps", out.steps},
                          {"total_infected", out.total_infected},
                          {"total_created", out.total_created},
                          {"peak_alive", out.peak_alive},
                          {"origin_visits", out.origin_visits},
                          {"max_radius", out.max_radius},
                          {"seed", out.seed}};
}

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string q = "\"";
    for (char c : field) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path), columns_(header.size()) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != columns_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_quote(fields[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
    std::size_t columns_;
};

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct Manifest {
    RunConfig config;
    std::vector<std::string> outputs;
    std::string started_utc;
    std::string finished_utc;
};

inline std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Written via rename so a crashed run never leaves a partial manifest.
inline void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    nlohmann::json j{{"config_hash", config_hash(m.config)},
                     {"config", emit_config(m.config)},
                     {"seed", m.config.seed},
                     {"version", kArtifactVersion},
                     {"started", m.started_utc},
                     {"finished", m.finished_utc},
                     {"outputs", m.outputs}};
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace simi

#endif  // SIMI_IO_HPP
