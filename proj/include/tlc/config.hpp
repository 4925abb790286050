#pragma once

// Run configuration: an INI document (or the same schema as JSON) with typed,
// path-addressed access. See docs/config.md for the schema.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tlc/evolve.hpp"
#include "tlc/sweep.hpp"
#include "tlc/trajectories.hpp"

namespace tlc {

class ConfigDocument {
public:
    ConfigDocument() = default;

    /// Parses by extension: .json as JSON, anything else as INI. Unknown
    /// sections and keys raise ConfigError naming the path.
    static ConfigDocument load(const std::string& path);
    static ConfigDocument parse_ini(const std::string& text);
    static ConfigDocument parse_json(const std::string& text);

    bool has(const std::string& path) const { return values_.count(path) != 0; }
    bool has_section(const std::string& section) const;

    /// Raw value; throws ConfigError("<path>", "missing required key").
    const std::string& require(const std::string& path) const;

    double get_double(const std::string& path) const;
    double get_double(const std::string& path, double fallback) const;
    int get_int(const std::string& path) const;
    int get_int(const std::string& path, int fallback) const;
    bool get_bool(const std::string& path, bool fallback) const;
    std::string get_string(const std::string& path, const std::string& fallback) const;
    std::optional<int> get_optional_int(const std::string& path) const;

    /// "start:stop:count" (inclusive, evenly spaced) or whitespace/comma separated numbers.
    std::vector<double> get_grid(const std::string& path) const;
    /// Whitespace separated words.
    std::vector<std::string> get_words(const std::string& path) const;

    void set(const std::string& path, const std::string& value);
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Every accepted "section.key".
const std::set<std::string>& config_schema();

/// [oscillator_a] / [oscillator_b]. gamma1..gamma4 are required; delta, kerr,
/// drive and drive_phase default to zero.
OscillatorParams read_oscillator(const ConfigDocument& doc, const std::string& section);

/// Both oscillators plus [coupling] g (default 0).
CoupledParams read_coupled(const ConfigDocument& doc);

SteadyStateOptions read_solver(const ConfigDocument& doc);

/// Cutoff of a section, overridden by `override_cutoff` when set.
int read_cutoff(const ConfigDocument& doc, const std::string& section, std::optional<int> override_cutoff);

struct TrajectoryConfig {
    double t_final = 100.0;
    int count = 1;
    /// "fock:<n>" or "coherent:<re>[,<im>]".
    std::string initial = "fock:0";
    double band = 0.5;
    TrajectoryOptions options;
};

TrajectoryConfig read_trajectory(const ConfigDocument& doc);

/// Initial state named by a TrajectoryConfig::initial string.
Vector initial_state(const FockSpace& space, const std::string& spec, const std::string& key_path);

SweepSpec read_sweep(const ConfigDocument& doc, std::optional<int> cutoff, std::optional<int> grid, int threads);
BlockadeSpec read_blockade(const ConfigDocument& doc, std::optional<int> cutoff, std::optional<int> grid,
                           int threads);

}  // namespace tlc
