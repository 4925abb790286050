#include "tlc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& path)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw ConfigError(path, "expected a finite number, got '" + text + "'");
    }
    return v;
}

void check_known(const std::string& path)
{
    if (config_schema().count(path) == 0) {
        throw ConfigError(path, "unknown key");
    }
}

std::string json_scalar(const nlohmann::json& v, const std::string& path)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number()) {
        return v.dump();
    }
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) {
                out += ' ';
            }
            out += json_scalar(item, path);
        }
        return out;
    }
    throw ConfigError(path, "unsupported value type");
}

}  // namespace

const std::set<std::string>& config_schema()
{
    static const std::set<std::string> keys = [] {
        std::set<std::string> k;
        for (const char* osc : {"oscillator_a", "oscillator_b"}) {
            for (const char* f : {"delta", "kerr", "drive", "drive_phase", "gamma1", "gamma2", "gamma3", "gamma4",
                                  "cutoff", "sector_boundary"}) {
                k.insert(std::string(osc) + "." + f);
            }
        }
        for (const char* f : {"coupling.g", "solver.residual_tol", "solver.charge_symmetry", "solver.cutoff_tol",
                              "solver.fallback_time", "sweep.axis1", "sweep.axis1_values", "sweep.axis2",
                              "sweep.axis2_values", "sweep.measures", "sweep.coupled", "sweep.check_convergence",
                              "sweep.convergence_tol", "output.grid", "output.prefix", "trajectory.t_final",
                              "trajectory.count", "trajectory.initial", "trajectory.dt",
                              "trajectory.sample_interval", "trajectory.band", "trajectory.record_jumps",
                              "spectrum.sector", "spectrum.omega_max", "spectrum.omega_points", "spectrum.dtau",
                              "spectrum.decay_tol", "spectrum.max_tau", "wigner.extent", "wigner.points",
                              "blockade.rate", "blockade.ratios", "blockade.measure"}) {
            k.insert(f);
        }
        return k;
    }();
    return keys;
}

ConfigDocument ConfigDocument::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return json ? parse_json(ss.str()) : parse_ini(ss.str());
}

ConfigDocument ConfigDocument::parse_ini(const std::string& text)
{
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", "malformed INI at line " + std::to_string(e.line()) + ": " + e.message());
    }
    ConfigDocument doc;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(section, "key outside of a section");
        }
        for (const auto& [key, value] : body) {
            const std::string path = section + "." + key;
            check_known(path);
            doc.values_[path] = trim(value.data());
        }
    }
    return doc;
}

ConfigDocument ConfigDocument::parse_json(const std::string& text)
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("", "top level must be an object of sections");
    }
    ConfigDocument doc;
    for (const auto& [section, body] : root.items()) {
        if (!body.is_object()) {
            throw ConfigError(section, "section must be an object");
        }
        for (const auto& [key, value] : body.items()) {
            const std::string path = section + "." + key;
            check_known(path);
            doc.values_[path] = json_scalar(value, path);
        }
    }
    return doc;
}

bool ConfigDocument::has_section(const std::string& section) const
{
    const std::string prefix = section + ".";
    const auto it = values_.lower_bound(prefix);
    return it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

const std::string& ConfigDocument::require(const std::string& path) const
{
    const auto it = values_.find(path);
    if (it == values_.end()) {
        throw ConfigError(path, "missing required key");
    }
    return it->second;
}

double ConfigDocument::get_double(const std::string& path) const
{
    return parse_number(require(path), path);
}

double ConfigDocument::get_double(const std::string& path, double fallback) const
{
    return has(path) ? get_double(path) : fallback;
}

int ConfigDocument::get_int(const std::string& path) const
{
    const double v = get_double(path);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError(path, "expected an integer");
    }
    return static_cast<int>(v);
}

int ConfigDocument::get_int(const std::string& path, int fallback) const
{
    return has(path) ? get_int(path) : fallback;
}

std::optional<int> ConfigDocument::get_optional_int(const std::string& path) const
{
    if (!has(path)) {
        return std::nullopt;
    }
    return get_int(path);
}

bool ConfigDocument::get_bool(const std::string& path, bool fallback) const
{
    if (!has(path)) {
        return fallback;
    }
    const std::string v = require(path);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(path, "expected a boolean, got '" + v + "'");
}

std::string ConfigDocument::get_string(const std::string& path, const std::string& fallback) const
{
    return has(path) ? require(path) : fallback;
}

std::vector<double> ConfigDocument::get_grid(const std::string& path) const
{
    const std::string text = trim(require(path));
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) {
            parts.push_back(item);
        }
        if (parts.size() != 3) {
            throw ConfigError(path, "range must be start:stop:count");
        }
        const double a = parse_number(parts[0], path);
        const double b = parse_number(parts[1], path);
        const double c = parse_number(parts[2], path);
        if (c < 1 || c != std::floor(c)) {
            throw ConfigError(path, "range count must be a positive integer");
        }
        const int n = static_cast<int>(c);
        for (int i = 0; i < n; ++i) {
            out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        }
        return out;
    }
    std::string cleaned = text;
    for (auto& ch : cleaned) {
        if (ch == ',') {
            ch = ' ';
        }
    }
    std::istringstream in(cleaned);
    std::string word;
    while (in >> word) {
        out.push_back(parse_number(word, path));
    }
    if (out.empty()) {
        throw ConfigError(path, "empty grid");
    }
    return out;
}

std::vector<std::string> ConfigDocument::get_words(const std::string& path) const
{
    std::istringstream in(require(path));
    std::vector<std::string> out;
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

void ConfigDocument::set(const std::string& path, const std::string& value)
{
    check_known(path);
    values_[path] = value;
}

OscillatorParams read_oscillator(const ConfigDocument& doc, const std::string& section)
{
    OscillatorParams p;
    for (int j = 0; j < 4; ++j) {
        p.gamma[j] = doc.get_double(section + ".gamma" + std::to_string(j + 1));
        if (p.gamma[j] < 0.0) {
            throw ConfigError(section + ".gamma" + std::to_string(j + 1), "rates must be nonnegative");
        }
    }
    p.delta = doc.get_double(section + ".delta", 0.0);
    p.kerr = doc.get_double(section + ".kerr", 0.0);
    const double mag = doc.get_double(section + ".drive", 0.0);
    const double phase = doc.get_double(section + ".drive_phase", 0.0);
    p.drive = std::polar(mag, phase);
    if (!p.has_dissipation()) {
        throw ConfigError(section + ".gamma1", "at least one rate must be positive");
    }
    return p;
}

CoupledParams read_coupled(const ConfigDocument& doc)
{
    CoupledParams p;
    p.osc_a = read_oscillator(doc, "oscillator_a");
    p.osc_b = read_oscillator(doc, "oscillator_b");
    p.coupling = doc.get_double("coupling.g", 0.0);
    return p;
}

SteadyStateOptions read_solver(const ConfigDocument& doc)
{
    SteadyStateOptions o;
    o.residual_tol = doc.get_double("solver.residual_tol", o.residual_tol);
    o.use_charge_symmetry = doc.get_bool("solver.charge_symmetry", o.use_charge_symmetry);
    o.cutoff_tol = doc.get_double("solver.cutoff_tol", o.cutoff_tol);
    o.fallback_time = doc.get_double("solver.fallback_time", o.fallback_time);
    if (!(o.residual_tol > 0.0)) {
        throw ConfigError("solver.residual_tol", "must be positive");
    }
    return o;
}

int read_cutoff(const ConfigDocument& doc, const std::string& section, std::optional<int> override_cutoff)
{
    const int n = override_cutoff ? *override_cutoff : doc.get_int(section + ".cutoff");
    if (n < 1) {
        throw ConfigError(section + ".cutoff", "cutoff must be at least 1");
    }
    return n;
}

TrajectoryConfig read_trajectory(const ConfigDocument& doc)
{
    TrajectoryConfig c;
    c.t_final = doc.get_double("trajectory.t_final");
    c.count = doc.get_int("trajectory.count", c.count);
    c.initial = doc.get_string("trajectory.initial", c.initial);
    c.band = doc.get_double("trajectory.band", c.band);
    c.options.dt = doc.get_double("trajectory.dt", c.options.dt);
    c.options.sample_interval = doc.get_double("trajectory.sample_interval", c.options.sample_interval);
    c.options.record_jumps = doc.get_bool("trajectory.record_jumps", false);
    if (!(c.t_final > 0.0)) {
        throw ConfigError("trajectory.t_final", "must be positive");
    }
    if (c.count < 1) {
        throw ConfigError("trajectory.count", "must be at least 1");
    }
    if (!(c.options.sample_interval > 0.0) || !(c.options.dt > 0.0)) {
        throw ConfigError("trajectory.sample_interval", "steps must be positive");
    }
    return c;
}

Vector initial_state(const FockSpace& space, const std::string& spec, const std::string& key_path)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError(key_path, "expected fock:<n> or coherent:<re>[,<im>]");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "fock") {
        const double n = parse_number(arg, key_path);
        if (n < 0 || n > space.cutoff() || n != std::floor(n)) {
            throw ConfigError(key_path, "Fock level outside the truncated space");
        }
        return fock_state(space, static_cast<int>(n));
    }
    if (kind == "coherent") {
        const auto comma = arg.find(',');
        const double re = parse_number(arg.substr(0, comma), key_path);
        const double im = comma == std::string::npos ? 0.0 : parse_number(arg.substr(comma + 1), key_path);
        return coherent_state(space, cplx(re, im));
    }
    throw ConfigError(key_path, "unknown initial state kind '" + kind + "'");
}

SweepSpec read_sweep(const ConfigDocument& doc, std::optional<int> cutoff, std::optional<int> grid, int threads)
{
    SweepSpec s;
    s.coupled = doc.get_bool("sweep.coupled", doc.has_section("oscillator_b"));
    s.fixed.osc_a = read_oscillator(doc, "oscillator_a");
    s.cutoff_a = read_cutoff(doc, "oscillator_a", cutoff);
    s.sector_boundary_a = doc.get_optional_int("oscillator_a.sector_boundary");
    if (s.coupled) {
        s.fixed.osc_b = read_oscillator(doc, "oscillator_b");
        s.fixed.coupling = doc.get_double("coupling.g", 0.0);
        s.cutoff_b = read_cutoff(doc, "oscillator_b", cutoff);
        s.sector_boundary_b = doc.get_optional_int("oscillator_b.sector_boundary");
    }
    s.axis1 = {doc.require("sweep.axis1"), doc.get_grid("sweep.axis1_values")};
    if (doc.has("sweep.axis2")) {
        s.axis2 = Axis{doc.require("sweep.axis2"), doc.get_grid("sweep.axis2_values")};
    }
    s.measures = doc.get_words("sweep.measures");
    s.grid = grid ? *grid : doc.get_int("output.grid", s.grid);
    s.threads = threads;
    s.solver = read_solver(doc);
    s.check_convergence = doc.get_bool("sweep.check_convergence", false);
    s.convergence_tol = doc.get_double("sweep.convergence_tol", s.convergence_tol);
    s.validate();
    return s;
}

BlockadeSpec read_blockade(const ConfigDocument& doc, std::optional<int> cutoff, std::optional<int> grid,
                           int threads)
{
    BlockadeSpec s;
    s.base = read_coupled(doc);
    s.cutoff_a = read_cutoff(doc, "oscillator_a", cutoff);
    s.cutoff_b = read_cutoff(doc, "oscillator_b", cutoff);
    s.sector_boundary = doc.get_optional_int("oscillator_a.sector_boundary");
    const int rate = doc.get_int("blockade.rate");
    if (rate < 1 || rate > 4) {
        throw ConfigError("blockade.rate", "must be 1, 2, 3 or 4");
    }
    s.rate_index = rate - 1;
    s.ratios = doc.get_grid("blockade.ratios");
    s.measure = doc.get_string("blockade.measure", s.measure);
    s.grid = grid ? *grid : doc.get_int("output.grid", s.grid);
    s.threads = threads;
    s.solver = read_solver(doc);
    return s;
}

}  // namespace tlc
