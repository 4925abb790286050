// tlcsim: command-line front end for the twin-limit-cycle simulator.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "tlc/config.hpp"
#include "tlc/errors.hpp"
#include "tlc/io.hpp"
#include "tlc/meanfield.hpp"
#include "tlc/measures.hpp"
#include "tlc/parallel.hpp"
#include "tlc/sweep.hpp"
#include "tlc/trajectories.hpp"

using namespace tlc;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 1;
    int threads = 0;
    std::optional<int> cutoff;
    std::optional<int> grid;
};

/// Collects written files and the sidecar metadata of one subcommand run.
class Output {
public:
    Output(const Globals& g, std::string command, const ConfigDocument& doc)
        : g_(g), command_(std::move(command)), doc_(doc), start_(std::chrono::steady_clock::now())
    {
        fs::create_directories(g_.out);
        prefix_ = doc.get_string("output.prefix", "");
    }

    void table(const std::string& name, const CsvTable& t)
    {
        const std::string file = prefix_ + name + ".csv";
        t.write((fs::path(g_.out) / file).string());
        files_.push_back(file);
    }

    json& results() { return results_; }
    json& tolerances() { return tolerances_; }

    void finish()
    {
        json params = json::object();
        for (const auto& [path, value] : doc_.values()) {
            const auto dot = path.find('.');
            params[path.substr(0, dot)][path.substr(dot + 1)] = value;
        }
        json meta;
        meta["program"] = "tlcsim";
        meta["version"] = TLC_VERSION;
        meta["subcommand"] = command_;
        meta["parameters"] = params;
        meta["tolerances"] = tolerances_;
        meta["seed"] = g_.seed;
        meta["threads"] = resolve_threads(g_.threads);
        meta["files"] = files_;
        meta["results"] = results_;
        meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_text((fs::path(g_.out) / (prefix_ + command_ + ".meta.json")).string(), meta.dump(2) + "\n");
    }

private:
    const Globals& g_;
    std::string command_;
    const ConfigDocument& doc_;
    std::chrono::steady_clock::time_point start_;
    std::string prefix_;
    std::vector<std::string> files_;
    json results_ = json::object();
    json tolerances_ = json::object();
};

std::string num(double v)
{
    return format_number(v);
}

CsvTable distribution_table(const PhaseDistribution& d)
{
    CsvTable t({"phase_rad", "value"});
    for (std::size_t i = 0; i < d.phases.size(); ++i) {
        t.add_row({num(d.phases[i]), num(d.values[i])});
    }
    return t;
}

json strength_json(const SyncStrength& s)
{
    return {{"max", s.max_value},
            {"argmax", std::isnan(s.argmax) ? json(nullptr) : json(s.argmax)},
            {"n_maxima", s.n_maxima},
            {"maxima", s.maxima}};
}

void print_strength(const std::string& label, const SyncStrength& s)
{
    std::printf("%-14s max=%.6g argmax=%.4f n_maxima=%d\n", label.c_str(), s.max_value, s.argmax, s.n_maxima);
}

ConfigDocument load(const Globals& g)
{
    if (g.config.empty()) {
        return {};
    }
    return ConfigDocument::load(g.config);
}

int grid_of(const Globals& g, const ConfigDocument& doc)
{
    const int m = g.grid ? *g.grid : doc.get_int("output.grid", 720);
    if (m < 8) {
        throw ConfigError("output.grid", "phase grid needs at least 8 points");
    }
    return m;
}

/// Single oscillator, or the coupled pair when [oscillator_b] is present.
struct System {
    bool coupled = false;
    CoupledParams params;
    FockSpace space_a{1};
    std::optional<FockSpace> space_b;
    Liouvillian gen;
};

std::optional<int> boundary(const ConfigDocument& doc, const std::string& section, const OscillatorParams& p)
{
    if (auto n = doc.get_optional_int(section + ".sector_boundary")) {
        return n;
    }
    if (radii(p).degenerate) {
        return std::nullopt;
    }
    return sector_boundary(p);
}

System build_system(const Globals& g, const ConfigDocument& doc, bool force_coupled = false)
{
    System s;
    s.coupled = force_coupled || doc.has_section("oscillator_b");
    s.params.osc_a = read_oscillator(doc, "oscillator_a");
    const int na = read_cutoff(doc, "oscillator_a", g.cutoff);
    s.space_a = FockSpace(na, boundary(doc, "oscillator_a", s.params.osc_a));
    if (s.coupled) {
        s.params.osc_b = read_oscillator(doc, "oscillator_b");
        s.params.coupling = doc.get_double("coupling.g", 0.0);
        const int nb = read_cutoff(doc, "oscillator_b", g.cutoff);
        s.space_b.emplace(nb, boundary(doc, "oscillator_b", s.params.osc_b));
        s.gen = build_coupled(s.params, s.space_a, *s.space_b);
    } else {
        s.gen = build_single(s.params.osc_a, s.space_a);
    }
    return s;
}

SteadyState solve(const System& s, const ConfigDocument& doc, Output& out)
{
    const auto opts = read_solver(doc);
    auto ss = steady_state(s.gen, opts);
    out.tolerances()["residual_tol"] = opts.residual_tol;
    out.tolerances()["cutoff_tol"] = opts.cutoff_tol;
    out.results()["residual"] = ss.residual;
    out.results()["top_population"] = ss.top_population;
    out.results()["cutoff_converged"] = ss.cutoff_converged;
    if (!ss.cutoff_converged) {
        std::fprintf(stderr, "warning: top Fock levels hold %.3g of the population; raise the cutoff\n",
                     ss.top_population);
    }
    return ss;
}

int cmd_meanfield(const Globals& g)
{
    const auto doc = load(g);
    const auto p = read_oscillator(doc, "oscillator_a");
    Output out(g, "meanfield", doc);
    const EffectivePotential v(p);
    const auto& r = v.radii();
    CsvTable roots({"radius", "stable"});
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
        roots.add_row({num(r.roots[i]), r.stable[i] ? "true" : "false"});
    }
    out.table("meanfield_roots", roots);
    out.results()["roots"] = r.roots;
    double r_max = r.roots.empty() ? 3.0 : 1.25 * r.roots.back();
    if (!r.degenerate) {
        const auto [b1, b2] = v.barriers();
        std::printf("r1=%.3f rc=%.3f r2=%.3f\n", r.r1, r.rc, r.r2);
        std::printf("n_c=%d\n", sector_boundary(p));
        std::printf("barrier_inner=%.6g barrier_outer=%.6g\n", b1, b2);
        out.results()["r1"] = r.r1;
        out.results()["rc"] = r.rc;
        out.results()["r2"] = r.r2;
        out.results()["n_c"] = sector_boundary(p);
        out.results()["barrier_inner"] = b1;
        out.results()["barrier_outer"] = b2;
    } else {
        std::printf("not a twin limit cycle; stationary radii:");
        for (double x : r.roots) {
            std::printf(" %.6g", x);
        }
        std::printf("\n");
    }
    CsvTable pot({"r", "V"});
    const int n = 401;
    for (int i = 0; i < n; ++i) {
        const double x = r_max * i / (n - 1);
        pot.add_row({num(x), num(v(x))});
    }
    out.table("potential", pot);
    out.finish();
    return 0;
}

int cmd_steady(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc);
    Output out(g, "steady", doc);
    const auto ss = solve(sys, doc, out);
    CsvTable obs({"quantity", "value"});
    auto add = [&](const std::string& k, double v) {
        obs.add_row({k, num(v)});
        out.results()[k] = v;
    };
    add("trace", ss.state.trace().real());
    add("residual", ss.residual);
    add("min_eigenvalue", ss.state.min_eigenvalue());
    add("top_population", ss.top_population);
    auto populations = [&](const DensityMatrix& r, const FockSpace& sp, const std::string& tag) {
        add("mean_photons_" + tag, r.expect(number(sp)).real());
        const cplx a = r.expect(annihilation(sp));
        add("abs_a_" + tag, std::abs(a));
        CsvTable t({"n", "population"});
        for (int k = 0; k < r.dimension(); ++k) {
            t.add_row({std::to_string(k), num(r.rho(k, k).real())});
        }
        out.table("populations_" + tag, t);
    };
    if (sys.coupled) {
        populations(partial_trace(ss.state, 0), sys.space_a, "a");
        populations(partial_trace(ss.state, 1), *sys.space_b, "b");
    } else {
        populations(ss.state, sys.space_a, "a");
    }
    out.table("steady", obs);
    for (const auto& row : obs.rows()) {
        std::printf("%s=%s\n", row[0].c_str(), row[1].c_str());
    }
    out.finish();
    return 0;
}

int cmd_wigner(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc);
    Output out(g, "wigner", doc);
    const auto ss = solve(sys, doc, out);
    const DensityMatrix rho = sys.coupled ? partial_trace(ss.state, 0) : ss.state;
    double extent = doc.get_double("wigner.extent", 0.0);
    if (extent <= 0.0) {
        extent = 1.5 * std::sqrt(static_cast<double>(sys.space_a.cutoff())) + 2.0;
    }
    const int n = doc.get_int("wigner.points", 121);
    if (n < 2) {
        throw ConfigError("wigner.points", "need at least 2 points");
    }
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = -extent + 2.0 * extent * i / (n - 1);
    }
    const auto w = wigner(rho, xs, xs);
    CsvTable t({"x", "p", "w"});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            t.add_row({num(xs[i]), num(xs[j]), num(w.values(i, j))});
        }
    }
    out.table("wigner", t);
    const auto rings = ring_radii(rho, extent);
    out.results()["integral"] = w.integral;
    out.results()["ring_radii"] = rings;
    std::printf("integral=%.6f%s\n", w.integral, w.truncated ? " (grid truncates the support)" : "");
    std::printf("ring radii:");
    for (double r : rings) {
        std::printf(" %.4f", r);
    }
    std::printf("\n");
    out.finish();
    return 0;
}

int cmd_phase(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc);
    Output out(g, "phase", doc);
    const auto ss = solve(sys, doc, out);
    const int m = grid_of(g, doc);
    const DensityMatrix rho = sys.coupled ? partial_trace(ss.state, 0) : ss.state;
    auto emit = [&](const std::string& tag, const PhaseDistribution& d) {
        out.table(tag, distribution_table(d));
        const auto s = sync_strength(d);
        out.results()[tag] = strength_json(s);
        print_strength(tag, s);
    };
    emit("phase", p1(rho, m));
    if (sys.space_a.has_sector_boundary()) {
        for (Sector sec : {Sector::in, Sector::out}) {
            const std::string tag = std::string("phase_") + to_string(sec);
            try {
                emit(tag, p1_sector(rho, sys.space_a, sec, m));
            } catch (const EmptySectorError& e) {
                std::printf("%-14s empty sector\n", tag.c_str());
                out.results()[tag] = nullptr;
            }
        }
    }
    out.finish();
    return 0;
}

int cmd_phase2(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc, true);
    Output out(g, "phase2", doc);
    const auto ss = solve(sys, doc, out);
    const int m = grid_of(g, doc);
    auto emit = [&](const std::string& tag, const PhaseDistribution& d) {
        out.table(tag, distribution_table(d));
        const auto s = sync_strength(d);
        out.results()[tag] = strength_json(s);
        print_strength(tag, s);
    };
    emit("phase2", p2(ss.state, m));
    if (sys.space_a.has_sector_boundary() && sys.space_b->has_sector_boundary()) {
        for (Sector a : {Sector::in, Sector::out}) {
            for (Sector b : {Sector::in, Sector::out}) {
                const std::string tag = std::string("phase2_") + to_string(a) + "_" + to_string(b);
                try {
                    emit(tag, p2_sector(ss.state, sys.space_a, *sys.space_b, a, b, m));
                } catch (const EmptySectorError&) {
                    std::printf("%-14s empty sector\n", tag.c_str());
                    out.results()[tag] = nullptr;
                }
                out.results()[tag + "_coherence"] =
                    std::abs(first_order_coherence(ss.state, sys.space_a, *sys.space_b, a, b));
            }
        }
    }
    out.finish();
    return 0;
}

int cmd_spectrum(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc);
    if (sys.coupled) {
        throw ConfigError("oscillator_b", "spectrum is computed for a single oscillator");
    }
    Output out(g, "spectrum", doc);
    const auto ss = solve(sys, doc, out);
    const std::string which = doc.get_string("spectrum.sector", "both");
    std::vector<std::pair<std::string, Operator>> ops;
    if (which == "full") {
        ops.emplace_back("full", annihilation(sys.space_a));
    } else if (which == "in" || which == "out" || which == "both") {
        for (Sector sec : {Sector::in, Sector::out}) {
            if (which == "both" || which == to_string(sec)) {
                ops.emplace_back(to_string(sec), weighted_truncated_annihilation(sys.space_a, sec));
            }
        }
    } else {
        throw ConfigError("spectrum.sector", "expected in, out, both or full");
    }
    const double w_max = doc.get_double("spectrum.omega_max", 10.0);
    const int nw = doc.get_int("spectrum.omega_points", 401);
    if (nw < 2 || !(w_max > 0.0)) {
        throw ConfigError("spectrum.omega_points", "need a positive range with at least 2 points");
    }
    std::vector<double> omegas(nw);
    for (int i = 0; i < nw; ++i) {
        omegas[i] = -w_max + 2.0 * w_max * i / (nw - 1);
    }
    const double dtau = doc.get_double("spectrum.dtau", 0.02);
    const double decay = doc.get_double("spectrum.decay_tol", 1e-6);
    const double max_tau = doc.get_double("spectrum.max_tau", 400.0);
    out.tolerances()["decay_tol"] = decay;
    for (const auto& [tag, op] : ops) {
        const auto corr = two_time_correlation_adaptive(sys.gen, ss.state, op.adjoint(), op, dtau, decay, max_tau);
        const auto s = power_spectrum(corr, omegas, true, decay);
        CsvTable t({"omega", "S"});
        std::size_t best = 0;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            t.add_row({num(omegas[i]), num(s.values[i])});
            if (s.values[i] > s.values[best]) {
                best = i;
            }
        }
        out.table("spectrum_" + tag, t);
        out.results()["spectrum_" + tag] = {{"peak_omega", omegas[best]},
                                            {"peak_value", s.values[best]},
                                            {"coherent_weight", s.coherent_weight},
                                            {"truncated", s.truncated}};
        std::printf("spectrum_%s peak_omega=%.4f peak=%.6g coherent_weight=%.3g\n", tag.c_str(), omegas[best],
                    s.values[best], s.coherent_weight);
    }
    out.finish();
    return 0;
}

int cmd_traject(const Globals& g)
{
    const auto doc = load(g);
    const auto p = read_oscillator(doc, "oscillator_a");
    const FockSpace space(read_cutoff(doc, "oscillator_a", g.cutoff));
    const auto tc = read_trajectory(doc);
    const Vector psi0 = initial_state(space, tc.initial, "trajectory.initial");
    Output out(g, "traject", doc);
    const auto records = run_ensemble(p, space, psi0, tc.t_final, tc.count, g.seed, tc.options, g.threads);
    const auto r = radii(p);
    CsvTable series({"trajectory", "time", "amplitude", "radius"});
    CsvTable jumps({"trajectory", "time", "channel"});
    CsvTable stats({"trajectory", "seed", "fraction_inner", "fraction_outer", "crossings"});
    double inner = 0.0;
    double outer = 0.0;
    double crossings = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& rec = records[k];
        const std::string id = std::to_string(k);
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            series.add_row({id, num(rec.times[i]), num(rec.amplitude[i]), num(rec.radius[i])});
        }
        for (const auto& j : rec.jumps) {
            jumps.add_row({id, num(j.time), std::to_string(j.channel + 1)});
        }
        if (!r.degenerate) {
            const auto st = residence_stats(rec, r.rc, tc.band);
            stats.add_row({id, std::to_string(rec.seed), num(st.fraction_inner), num(st.fraction_outer),
                           std::to_string(st.crossings)});
            inner += st.fraction_inner;
            outer += st.fraction_outer;
            crossings += st.crossings;
        }
    }
    out.table("trajectory", series);
    if (tc.options.record_jumps) {
        out.table("jumps", jumps);
    }
    if (!r.degenerate) {
        out.table("residence", stats);
        const double n = static_cast<double>(records.size());
        std::printf("fraction_inner=%.4f fraction_outer=%.4f mean_crossings=%.2f\n", inner / n, outer / n,
                    crossings / n);
        out.results()["fraction_inner"] = inner / n;
        out.results()["fraction_outer"] = outer / n;
        out.results()["mean_crossings"] = crossings / n;
    }
    out.finish();
    return 0;
}

int cmd_mutinfo(const Globals& g)
{
    const auto doc = load(g);
    const auto sys = build_system(g, doc, true);
    Output out(g, "mutinfo", doc);
    const auto ss = solve(sys, doc, out);
    CsvTable t({"truncation", "mutual_information"});
    const double full = mutual_information(ss.state, sys.space_a, *sys.space_b);
    t.add_row({"full", num(full)});
    std::printf("I(full)=%.6g\n", full);
    out.results()["full"] = full;
    if (sys.space_a.has_sector_boundary() && sys.space_b->has_sector_boundary()) {
        for (Sector a : {Sector::in, Sector::out}) {
            for (Sector b : {Sector::in, Sector::out}) {
                const std::string tag = std::string(to_string(a)) + "," + to_string(b);
                const double v = mutual_information(ss.state, sys.space_a, *sys.space_b, std::make_pair(a, b));
                t.add_row({tag, num(v)});
                out.results()[tag] = v;
                std::printf("I(%s)=%.6g\n", tag.c_str(), v);
            }
        }
    }
    out.table("mutinfo", t);
    out.finish();
    return 0;
}

int cmd_sweep(const Globals& g)
{
    const auto doc = load(g);
    const auto spec = read_sweep(doc, g.cutoff, g.grid, g.threads);
    Output out(g, "sweep", doc);
    const auto res = run_sweep(spec);
    CsvTable t({spec.axis1.name, spec.axis2 ? spec.axis2->name : "axis2", "measure", "value", "max", "argmax",
                "n_maxima", "ok", "converged", "error"});
    int failed = 0;
    for (const auto& row : res.rows) {
        t.add_row({num(row.x1), num(row.x2), row.measure, num(row.value), num(row.max_value), num(row.argmax),
                   std::to_string(row.n_maxima), row.ok ? "true" : "false", row.converged ? "true" : "false",
                   row.error});
        failed += row.ok ? 0 : 1;
    }
    out.table("sweep", t);
    out.results()["spec_hash"] = res.spec_hash;
    out.results()["cutoff_a"] = res.cutoff_a;
    out.results()["cutoff_b"] = res.cutoff_b;
    out.results()["failed_rows"] = failed;
    out.tolerances()["residual_tol"] = res.residual_tol;
    if (spec.check_convergence) {
        out.tolerances()["convergence_tol"] = spec.convergence_tol;
    }
    std::printf("rows=%zu failed=%d spec_hash=%s\n", res.rows.size(), failed, res.spec_hash.c_str());
    out.finish();
    return 0;
}

int cmd_blockade(const Globals& g)
{
    const auto doc = load(g);
    const auto spec = read_blockade(doc, g.cutoff, g.grid, g.threads);
    Output out(g, "blockade", doc);
    const auto res = blockade_scan(spec);
    CsvTable t({"ratio", "max", "argmax", "n_maxima", "maxima", "ok", "error"});
    for (const auto& pt : res.points) {
        std::string maxima;
        for (double x : pt.strength.maxima) {
            if (!maxima.empty()) {
                maxima += ' ';
            }
            maxima += num(x);
        }
        t.add_row({num(pt.ratio), num(pt.strength.max_value), num(pt.strength.argmax),
                   std::to_string(pt.strength.n_maxima), maxima, pt.ok ? "true" : "false", pt.error});
    }
    out.table("blockade", t);
    if (res.window) {
        std::printf("bistable window: [%.4f, %.4f]%s\n", res.window->first, res.window->second,
                    res.window_open ? " (reaches the edge of the scan)" : "");
        out.results()["window"] = {res.window->first, res.window->second};
    } else {
        std::printf("no bistable window around ratio 1\n");
        out.results()["window"] = nullptr;
    }
    out.results()["window_open"] = res.window_open;
    out.tolerances()["residual_tol"] = spec.solver.residual_tol;
    out.finish();
    return 0;
}

int cmd_validate(const std::vector<std::string>& files)
{
    int bad = 0;
    for (const auto& f : files) {
        const auto rep = validate_file(f);
        std::printf("%s %s%s%s\n", rep.ok ? "ok  " : "FAIL", f.c_str(), rep.ok ? "" : ": ", rep.message.c_str());
        bad += rep.ok ? 0 : 1;
    }
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Twin-limit-cycle quantum oscillator simulator"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 1;
    int cutoff = 0;
    int grid = 0;
    app.add_option("--config", g.config, "Run configuration (.ini or .json)");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Master seed for stochastic subcommands")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--cutoff", cutoff, "Override the Fock cutoff of every oscillator")->check(CLI::PositiveNumber);
    app.add_option("--grid", grid, "Override the phase grid size")->check(CLI::Range(8, 1 << 20));
    app.fallthrough();

    std::vector<std::string> files;
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Globals&);
    };
    const Entry entries[] = {
        {"meanfield", "Mean-field radii, effective potential and barriers", cmd_meanfield},
        {"steady", "Steady state and basic observables", cmd_steady},
        {"wigner", "Wigner function of the steady state", cmd_wigner},
        {"phase", "Phase distribution P1 and its sector parts", cmd_phase},
        {"phase2", "Relative-phase distribution P2 and its sector parts", cmd_phase2},
        {"spectrum", "Power spectra of the truncated operators", cmd_spectrum},
        {"traject", "Quantum-jump trajectories and dwell statistics", cmd_traject},
        {"mutinfo", "Quantum mutual information of a coupled pair", cmd_mutinfo},
        {"sweep", "Parameter sweep over one or two axes", cmd_sweep},
        {"blockade", "Bistable-window scan over a rate ratio", cmd_blockade},
    };
    for (const auto& e : entries) {
        app.add_subcommand(e.name, e.help);
    }
    auto* validate = app.add_subcommand("validate", "Check that output files re-serialize without differences");
    validate->add_option("files", files, "CSV or JSON files")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    g.seed = seed;
    if (cutoff > 0) {
        g.cutoff = cutoff;
    }
    if (grid > 0) {
        g.grid = grid;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(files);
        }
        for (const auto& e : entries) {
            if (app.got_subcommand(e.name)) {
                return e.run(g);
            }
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ConfigurationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "solver error: %s (residual %.3e)\n", e.what(), e.residual());
        return 3;
    } catch (const StiffnessError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const SingularityError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
