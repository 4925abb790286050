#include "tlc/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tlc/errors.hpp"
#include "tlc/meanfield.hpp"
#include "tlc/parallel.hpp"

namespace tlc {

namespace {

double* oscillator_field(OscillatorParams& o, const std::string& field)
{
    if (field == "delta") {
        return &o.delta;
    }
    if (field == "kerr") {
        return &o.kerr;
    }
    if (field.size() == 6 && field.rfind("gamma", 0) == 0 && field[5] >= '1' && field[5] <= '4') {
        return &o.gamma[field[5] - '1'];
    }
    return nullptr;
}

bool parse_sector(const std::string& s, Sector& out)
{
    if (s == "in") {
        out = Sector::in;
        return true;
    }
    if (s == "out") {
        out = Sector::out;
        return true;
    }
    return false;
}

bool parse_sector_pair(const std::string& s, Sector& a, Sector& b)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        return false;
    }
    return parse_sector(s.substr(0, comma), a) && parse_sector(s.substr(comma + 1), b);
}

struct MeasureName {
    std::string head;
    std::string tail;
};

MeasureName split_measure(const std::string& name)
{
    const auto dot = name.find('.');
    if (dot == std::string::npos) {
        return {name, ""};
    }
    return {name.substr(0, dot), name.substr(dot + 1)};
}

SweepRow distribution_row(const std::string& name, const PhaseDistribution& dist)
{
    SweepRow row;
    row.measure = name;
    const auto s = sync_strength(dist);
    row.max_value = s.max_value;
    row.argmax = s.argmax;
    row.n_maxima = s.n_maxima;
    row.value = s.max_value;
    return row;
}

SweepRow scalar_row(const std::string& name, double v)
{
    SweepRow row;
    row.measure = name;
    row.value = v;
    row.max_value = v;
    row.argmax = std::numeric_limits<double>::quiet_NaN();
    return row;
}

std::string fnv1a(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_grid(const Axis& axis, const char* key)
{
    if (!is_parameter_name(axis.name)) {
        throw ConfigError(std::string("sweep.") + key + ".name", "unknown parameter '" + axis.name + "'");
    }
    if (axis.values.empty()) {
        throw ConfigError(std::string("sweep.") + key + ".values", "empty grid");
    }
    bool inc = true;
    bool dec = true;
    for (std::size_t i = 1; i < axis.values.size(); ++i) {
        inc = inc && axis.values[i] > axis.values[i - 1];
        dec = dec && axis.values[i] < axis.values[i - 1];
    }
    if (!inc && !dec) {
        throw ConfigError(std::string("sweep.") + key + ".values", "grid is not strictly monotone");
    }
}

std::optional<int> boundary_for(const OscillatorParams& p, const std::optional<int>& fixed)
{
    if (fixed) {
        return fixed;
    }
    const auto r = radii(p);
    if (r.degenerate) {
        return std::nullopt;
    }
    return sector_boundary(p);
}

struct PointResult {
    std::vector<SweepRow> rows;
};

std::vector<SweepRow> solve_point(const SweepSpec& spec, const CoupledParams& p, int cutoff_a, int cutoff_b)
{
    const FockSpace space_a(cutoff_a, boundary_for(p.osc_a, spec.sector_boundary_a));
    std::optional<FockSpace> space_b;
    Liouvillian gen;
    if (spec.coupled) {
        space_b.emplace(cutoff_b, boundary_for(p.osc_b, spec.sector_boundary_b));
        gen = build_coupled(p, space_a, *space_b);
    } else {
        gen = build_single(p.osc_a, space_a);
    }
    const auto ss = steady_state(gen, spec.solver);
    return evaluate_measures(ss.state, space_a, space_b, spec.measures, spec.grid);
}

}  // namespace

bool is_parameter_name(const std::string& name)
{
    CoupledParams probe;
    try {
        apply_parameter(probe, name, 0.0);
    } catch (const ConfigError&) {
        return false;
    }
    return true;
}

void apply_parameter(CoupledParams& p, const std::string& name, double value)
{
    if (name == "coupling") {
        p.coupling = value;
        return;
    }
    if (name == "kerr") {
        p.osc_a.kerr = value;
        p.osc_b.kerr = value;
        return;
    }
    if (name == "delta") {
        p.osc_b.delta = p.osc_a.delta + value;
        return;
    }
    if (name == "detuning") {
        p.osc_a.delta = value;
        return;
    }
    if (name == "drive") {
        p.osc_a.drive = value;
        return;
    }
    if (name.size() > 2 && name[1] == '.' && (name[0] == 'a' || name[0] == 'b')) {
        auto& o = name[0] == 'a' ? p.osc_a : p.osc_b;
        const std::string field = name.substr(2);
        if (field == "drive") {
            o.drive = value;
            return;
        }
        if (double* f = oscillator_field(o, field)) {
            *f = value;
            return;
        }
    }
    throw ConfigError("sweep.axis", "unknown parameter '" + name + "'");
}

bool is_measure_name(const std::string& name, bool coupled)
{
    const auto [head, tail] = split_measure(name);
    Sector a;
    Sector b;
    if (head == "population" || head == "top_population") {
        return tail.empty();
    }
    if (head == "p1") {
        return tail.empty() || parse_sector(tail, a);
    }
    if (!coupled) {
        return false;
    }
    if (head == "p2" || head == "mi") {
        return tail.empty() || parse_sector_pair(tail, a, b);
    }
    if (head == "coherence") {
        return parse_sector_pair(tail, a, b);
    }
    return false;
}

void SweepSpec::validate() const
{
    check_grid(axis1, "axis1");
    if (axis2) {
        check_grid(*axis2, "axis2");
    }
    if (measures.empty()) {
        throw ConfigError("sweep.measures", "no measures requested");
    }
    for (const auto& m : measures) {
        if (!is_measure_name(m, coupled)) {
            throw ConfigError("sweep.measures", "unknown measure '" + m + "'");
        }
    }
    if (cutoff_a < 1 || (coupled && cutoff_b < 1)) {
        throw ConfigError("solver.cutoff", "cutoff must be positive");
    }
    if (grid < 8) {
        throw ConfigError("output.grid", "phase grid needs at least 8 points");
    }
}

std::vector<SweepRow> evaluate_measures(const DensityMatrix& rho, const FockSpace& space_a,
                                        const std::optional<FockSpace>& space_b,
                                        const std::vector<std::string>& measures, int grid)
{
    std::vector<SweepRow> rows;
    rows.reserve(measures.size());
    for (const auto& name : measures) {
        const auto [head, tail] = split_measure(name);
        Sector a = Sector::in;
        Sector b = Sector::in;
        if (head == "population") {
            const DensityMatrix ra = space_b ? partial_trace(rho, 0) : rho;
            rows.push_back(scalar_row(name, ra.expect(number(space_a)).real()));
        } else if (head == "top_population") {
            rows.push_back(scalar_row(name, top_level_population(rho)));
        } else if (head == "p1") {
            const DensityMatrix ra = space_b ? partial_trace(rho, 0) : rho;
            if (tail.empty()) {
                rows.push_back(distribution_row(name, p1(ra, grid)));
            } else {
                parse_sector(tail, a);
                rows.push_back(distribution_row(name, p1_sector(ra, space_a, a, grid)));
            }
        } else if (head == "p2") {
            if (tail.empty()) {
                rows.push_back(distribution_row(name, p2(rho, grid)));
            } else {
                parse_sector_pair(tail, a, b);
                rows.push_back(distribution_row(name, p2_sector(rho, space_a, *space_b, a, b, grid)));
            }
        } else if (head == "coherence") {
            parse_sector_pair(tail, a, b);
            rows.push_back(scalar_row(name, std::abs(first_order_coherence(rho, space_a, *space_b, a, b))));
        } else if (head == "mi") {
            if (tail.empty()) {
                rows.push_back(scalar_row(name, mutual_information(rho, space_a, *space_b)));
            } else {
                parse_sector_pair(tail, a, b);
                rows.push_back(scalar_row(name, mutual_information(rho, space_a, *space_b, std::make_pair(a, b))));
            }
        } else {
            throw ConfigError("sweep.measures", "unknown measure '" + name + "'");
        }
    }
    return rows;
}

std::string describe(const SweepSpec& spec)
{
    std::ostringstream os;
    os.precision(17);
    auto osc = [&](const char* tag, const OscillatorParams& o) {
        os << tag << " delta=" << o.delta << " kerr=" << o.kerr << " drive=" << o.drive.real() << ','
           << o.drive.imag() << " gamma=" << o.gamma[0] << ',' << o.gamma[1] << ',' << o.gamma[2] << ','
           << o.gamma[3] << '\n';
    };
    auto axis = [&](const char* tag, const Axis& a) {
        os << tag << ' ' << a.name << ':';
        for (double v : a.values) {
            os << ' ' << v;
        }
        os << '\n';
    };
    axis("axis1", spec.axis1);
    if (spec.axis2) {
        axis("axis2", *spec.axis2);
    }
    osc("a", spec.fixed.osc_a);
    if (spec.coupled) {
        osc("b", spec.fixed.osc_b);
        os << "coupling=" << spec.fixed.coupling << '\n';
    }
    os << "measures:";
    for (const auto& m : spec.measures) {
        os << ' ' << m;
    }
    os << "\ncutoffs=" << spec.cutoff_a << ',' << (spec.coupled ? spec.cutoff_b : 0);
    os << " boundaries=" << spec.sector_boundary_a.value_or(-1) << ',' << spec.sector_boundary_b.value_or(-1);
    os << " grid=" << spec.grid << " residual_tol=" << spec.solver.residual_tol
       << " symmetry=" << spec.solver.use_charge_symmetry << " convergence=" << spec.check_convergence << ','
       << spec.convergence_tol << '\n';
    return os.str();
}

SweepResult run_sweep(const SweepSpec& spec)
{
    spec.validate();
    const std::size_t n1 = spec.axis1.values.size();
    const std::size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
    std::vector<PointResult> points(n1 * n2);

    parallel_for(points.size(), spec.threads, [&](std::size_t k) {
        const std::size_t i = k / n2;
        const std::size_t j = k % n2;
        CoupledParams p = spec.fixed;
        apply_parameter(p, spec.axis1.name, spec.axis1.values[i]);
        const double x2 = spec.axis2 ? spec.axis2->values[j] : std::numeric_limits<double>::quiet_NaN();
        if (spec.axis2) {
            apply_parameter(p, spec.axis2->name, x2);
        }
        std::vector<SweepRow> rows;
        try {
            p.validate();
            rows = solve_point(spec, p, spec.cutoff_a, spec.cutoff_b);
            if (spec.check_convergence) {
                const auto fine = solve_point(spec, p, 2 * spec.cutoff_a, 2 * spec.cutoff_b);
                for (std::size_t m = 0; m < rows.size(); ++m) {
                    rows[m].converged = std::abs(rows[m].value - fine[m].value) < spec.convergence_tol;
                }
            }
        } catch (const std::exception& e) {
            rows.clear();
            for (const auto& name : spec.measures) {
                SweepRow row;
                row.measure = name;
                row.ok = false;
                row.converged = false;
                row.value = row.max_value = row.argmax = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
                rows.push_back(row);
            }
        }
        for (auto& row : rows) {
            row.x1 = spec.axis1.values[i];
            row.x2 = x2;
        }
        points[k].rows = std::move(rows);
    });

    SweepResult result;
    result.spec_hash = fnv1a(describe(spec));
    result.cutoff_a = spec.cutoff_a;
    result.cutoff_b = spec.coupled ? spec.cutoff_b : 0;
    result.residual_tol = spec.solver.residual_tol;
    for (auto& pt : points) {
        for (auto& row : pt.rows) {
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

BlockadeResult blockade_scan(const BlockadeSpec& spec)
{
    if (spec.rate_index < 0 || spec.rate_index > 3) {
        throw ConfigError("blockade.rate", "rate index must be 1..4");
    }
    if (spec.ratios.empty()) {
        throw ConfigError("blockade.ratios", "empty grid");
    }
    for (std::size_t i = 1; i < spec.ratios.size(); ++i) {
        if (!(spec.ratios[i] > spec.ratios[i - 1])) {
            throw ConfigError("blockade.ratios", "ratios must be strictly increasing");
        }
    }
    const auto [head, tail] = split_measure(spec.measure);
    Sector alpha = Sector::in;
    Sector beta = Sector::in;
    if (head != "p2" || (!tail.empty() && !parse_sector_pair(tail, alpha, beta))) {
        throw ConfigError("blockade.measure", "expected p2 or p2.<sector>,<sector>");
    }
    const bool sectors = !tail.empty();

    BlockadeResult result;
    result.points.resize(spec.ratios.size());
    parallel_for(spec.ratios.size(), spec.threads, [&](std::size_t k) {
        auto& pt = result.points[k];
        pt.ratio = spec.ratios[k];
        CoupledParams p = spec.base;
        p.osc_a.gamma[spec.rate_index] = pt.ratio * p.osc_b.gamma[spec.rate_index];
        try {
            p.validate();
            std::optional<int> nc_a = spec.sector_boundary;
            std::optional<int> nc_b = spec.sector_boundary;
            if (sectors && !nc_a) {
                nc_a = sector_boundary(p.osc_a);
                nc_b = sector_boundary(p.osc_b);
            }
            const FockSpace sa(spec.cutoff_a, nc_a);
            const FockSpace sb(spec.cutoff_b, nc_b);
            const auto ss = steady_state(build_coupled(p, sa, sb), spec.solver);
            const auto dist = sectors ? p2_sector(ss.state, sa, sb, alpha, beta, spec.grid) : p2(ss.state, spec.grid);
            pt.strength = sync_strength(dist);
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });

    std::size_t centre = 0;
    for (std::size_t k = 1; k < spec.ratios.size(); ++k) {
        if (std::abs(spec.ratios[k] - 1.0) < std::abs(spec.ratios[centre] - 1.0)) {
            centre = k;
        }
    }
    auto bistable = [&](std::size_t k) { return result.points[k].ok && result.points[k].strength.n_maxima == 2; };
    if (bistable(centre)) {
        std::size_t lo = centre;
        std::size_t hi = centre;
        while (lo > 0 && bistable(lo - 1)) {
            --lo;
        }
        while (hi + 1 < spec.ratios.size() && bistable(hi + 1)) {
            ++hi;
        }
        result.window = std::make_pair(spec.ratios[lo], spec.ratios[hi]);
        result.window_open = lo == 0 || hi + 1 == spec.ratios.size();
    }
    return result;
}

int select_cutoff(const OscillatorParams& p, int start, double tol, int max_cutoff)
{
    double top = 1.0;
    for (int n = start; n <= max_cutoff; n *= 2) {
        const FockSpace s(n);
        const auto ss = steady_state(build_single(p, s));
        top = top_level_population(ss.state);
        if (top < tol) {
            return n;
        }
    }
    throw NonConvergenceError("cutoff search exceeded " + std::to_string(max_cutoff), top);
}

}  // namespace tlc
