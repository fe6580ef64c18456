// levi3: condition checks, mode experiments and identity suites for
// third-order weakly hyperbolic operators.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <levi3/battery.hpp>
#include <levi3/expectations.hpp>
#include <levi3/identities.hpp>

using namespace levi3;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kMismatch = 1, kUsage = 2, kNumerical = 3 };

struct Args {
    std::string config;
    std::vector<std::string> battery;  // empty name: every member
    bool battery_flag = false;
    double xi_min = 64, xi_max = 16384;
    int xi_steps = 9;
    std::vector<double> direction;
    int grid = 0;
    double eta = 0;
    std::uint64_t seed = 42;
    long samples = 10000;
    std::string out;
    std::string format = "doc";
    bool corrupt_discriminant = false;
    bool cross_check = false;
};

/// Non-finite numbers become strings so the document stays valid JSON.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

RunOptions options(const Args& a) {
    RunOptions o;
    o.norms = geometric_ladder(a.xi_min, a.xi_max, a.xi_steps);
    o.direction = a.direction;
    if (a.grid > 0) o.pointwise_grid = o.growth_grid = o.energy_grid = o.oscillation_grid = a.grid;
    o.eta = a.eta;
    return o;
}

json config_doc(const Args& a, const std::string& command) {
    json c;
    c["command"] = command;
    c["config"] = a.config;
    c["battery"] = a.battery;
    c["xi_min"] = a.xi_min;
    c["xi_max"] = a.xi_max;
    c["xi_steps"] = a.xi_steps;
    c["direction"] = a.direction;
    c["grid"] = a.grid;
    c["eta"] = a.eta;
    c["seed"] = a.seed;
    c["samples"] = a.samples;
    return c;
}

std::vector<OperatorSpec> selected(const Args& a) {
    std::vector<OperatorSpec> out;
    if (!a.config.empty()) out.push_back(load_operator_file(a.config));
    if (a.battery_flag) {
        if (a.battery.empty()) {
            for (auto& s : battery()) out.push_back(s);
        } else {
            for (auto& n : a.battery) out.push_back(battery_member(n));
        }
    }
    if (out.empty()) throw ConfigError("no operator given: use --config FILE or --battery [NAME]");
    return out;
}

// ---------------------------------------------------------------------------
// report documents

json doc(const ConditionReport& r) {
    json j;
    json fits;
    for (auto& name : condition_names()) {
        const auto& f = r.fits.at(name);
        fits[name] = {{"verdict", to_string(f.verdict)}, {"max_ratio", num(f.slope)},
                      {"excess", num(f.excess)}, {"ratios", nums(f.ratios)}};
    }
    j["verdicts"] = fits;
    json ladder = json::array();
    for (auto& row : r.ladder) {
        json vals;
        for (auto& name : condition_names()) vals[name] = num(row.values.get(name));
        json alts;
        for (auto& name : alternate_names()) alts[name] = num(row.values.get(name));
        ladder.push_back({{"xi_norm", row.xi_norm},
                          {"direction", row.direction},
                          {"integrals", vals},
                          {"alternates", alts},
                          {"panels", row.values.panels},
                          {"converged", row.values.converged}});
    }
    j["ladder"] = ladder;
    json bands = json::array();
    for (auto& b : r.bands)
        bands.push_back({{"alternate", b.alternate}, {"primary", b.primary}, {"lo", num(b.lo)}, {"hi", num(b.hi)},
                         {"stable", b.stable}});
    j["bands"] = bands;
    return j;
}

json doc(const CaseReport& r) {
    json j;
    j["case"] = to_string(r.kase);
    j["delta_max_scaled"] = num(r.delta_max);
    j["delta1_max_scaled"] = num(r.delta1_max);
    json res = json::array();
    for (auto& x : r.results)
        res.push_back({{"name", x.name},
                       {"kind", x.kind},
                       {"sup_coarse", num(x.sup_coarse)},
                       {"sup_fine", num(x.sup_fine)},
                       {"sup_by_xi", nums(x.sup_by_xi)},
                       {"holds", x.holds},
                       {"max_remainder", num(x.max_remainder)}});
    j["checks"] = res;
    j["all_hold"] = all_hold(r);
    return j;
}

json doc(const ConstCoeffReport& r) {
    json rows = json::array();
    for (auto& x : r.rows)
        rows.push_back({{"xi_norm", x.xi_norm},
                        {"l", nums({x.l[0], x.l[1], x.l[2]})},
                        {"m", nums({x.m[0], x.m[1]})},
                        {"garding_im", num(x.garding_im)}});
    return {{"decomposition_bounded", r.decomposition_bounded},
            {"garding_bounded", r.garding_bounded},
            {"garding_slope", num(r.garding_slope)},
            {"rows", rows},
            {"notes", r.notes}};
}

json doc(const RegularizedGapReport& r) {
    json rows = json::array();
    for (auto& x : r.rows)
        rows.push_back({{"xi_norm", x.xi_norm}, {"min_gap", num(x.min_gap)}, {"max_shift", num(x.max_shift)}});
    return {{"gap_floor", num(r.gap_floor)},
            {"gap_step_lo", num(r.gap_lo)},
            {"gap_step_hi", num(r.gap_hi)},
            {"shift_growth", num(r.shift_growth)},
            {"stable", r.stable},
            {"rows", rows}};
}

json doc(const GrowthFit& g) {
    json rows = json::array();
    for (auto& r : g.rows)
        rows.push_back({{"xi_norm", r.xi_norm},
                        {"log_amp", num(r.log_amp)},
                        {"blew_up", r.blew_up},
                        {"reach_t", num(r.reach_t)},
                        {"resid_poly", num(r.resid_poly)},
                        {"resid_exp", num(r.resid_exp)}});
    return {{"verdict", to_string(g.verdict)},
            {"kappa", num(g.kappa)},
            {"exp_model", {{"C", num(g.exp_C)}, {"kappa", num(g.exp_kappa)}, {"d", num(g.exp_d)}, {"e", num(g.exp_e)},
                           {"rms", num(g.rms_exp)}}},
            {"poly_model", {{"d", num(g.poly_d)}, {"e", num(g.poly_e)}, {"rms", num(g.rms_poly)}}},
            {"consecutive_wins", g.consecutive_wins},
            {"rows", rows}};
}

json doc(const EnergyLadder& e) {
    json rows = json::array();
    for (auto& r : e.rows)
        rows.push_back({{"xi_norm", r.xi_norm},
                        {"rate_over_K", num(r.rate_over_K)},
                        {"max_dlogE", num(r.max_dlogE)},
                        {"K_min", num(r.K_min)}});
    return {{"eta", e.eta}, {"worst_step", num(e.worst_step)}, {"stable", e.stable}, {"rows", rows}};
}

json doc(const OscillationReport& o) {
    json c;
    for (auto& [k, v] : o.counts) c[k] = v;
    return {{"constant", o.constant}, {"counts", c}};
}

json doc(const SecondOrderReport& s) {
    json rows = json::array();
    for (auto& r : s.rows)
        rows.push_back({{"xi_norm", r.xi_norm}, {"Ia", num(r.values.Ia)}, {"Ib", num(r.values.Ib)},
                        {"converged", r.values.converged}});
    auto fit = [](const LogFit& f, bool stable) {
        return json{{"verdict", to_string(f.verdict)}, {"ratios", nums(f.ratios)}, {"ratio_stable", stable}};
    };
    return {{"Ia", fit(s.Ia, s.Ia_stable)}, {"Ib", fit(s.Ib, s.Ib_stable)}, {"rows", rows}};
}

json doc(const Analysis& a) {
    json j = json::object();
    if (a.conditions) j["conditions"] = doc(*a.conditions);
    if (a.pointwise) j["pointwise"] = doc(*a.pointwise);
    if (a.const_coeff) j["const_coeff"] = doc(*a.const_coeff);
    if (a.gaps) j["regularized_gaps"] = doc(*a.gaps);
    if (a.growth) j["growth"] = doc(*a.growth);
    if (a.energy) j["energy"] = doc(*a.energy);
    if (a.oscillation) j["oscillation"] = doc(*a.oscillation);
    if (a.second_order) j["second_order"] = doc(*a.second_order);
    return j;
}

json doc(const std::vector<Check>& checks) {
    json a = json::array();
    for (auto& c : checks)
        a.push_back({{"key", c.key}, {"expected", c.expected}, {"observed", c.observed}, {"passed", c.passed}});
    return a;
}

bool quadrature_converged(const Analysis& a) {
    bool ok = true;
    if (a.conditions)
        for (auto& r : a.conditions->ladder) ok &= r.values.converged;
    if (a.second_order)
        for (auto& r : a.second_order->rows) ok &= r.values.converged;
    return ok;
}

// ---------------------------------------------------------------------------
// tables

struct Tables {
    std::ostringstream os;

    void title(const std::string& t) { os << "# " << t << "\n"; }
    template <class... T>
    void row(const T&... cells) {
        bool first = true;
        ((os << (first ? "" : "\t") << cells, first = false), ...);
        os << "\n";
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

void tables(Tables& t, const std::string& name, const Analysis& a, const std::vector<Check>& checks) {
    if (a.conditions) {
        t.title(name + " conditions");
        t.row("xi_norm", "I1", "I2", "I3", "I4", "IMcl", "INcl", "panels");
        for (auto& r : a.conditions->ladder)
            t.row(fmt(r.xi_norm), fmt(r.values.get("I1")), fmt(r.values.get("I2")), fmt(r.values.get("I3")),
                  fmt(r.values.get("I4")), fmt(r.values.get("IMcl")), fmt(r.values.get("INcl")), r.values.panels);
        t.title(name + " verdicts");
        t.row("condition", "verdict", "max_ratio", "excess");
        for (auto& n : condition_names()) {
            const auto& f = a.conditions->fits.at(n);
            t.row(n, to_string(f.verdict), fmt(f.slope), fmt(f.excess));
        }
    }
    if (a.pointwise) {
        t.title(name + " pointwise (case " + std::string(to_string(a.pointwise->kase)) + ")");
        t.row("check", "kind", "sup_coarse", "sup_fine", "holds");
        for (auto& r : a.pointwise->results) t.row(r.name, r.kind, fmt(r.sup_coarse), fmt(r.sup_fine), r.holds);
    }
    if (a.const_coeff) {
        t.title(name + " constant coefficients");
        t.row("xi_norm", "max_l", "max_m", "garding_im");
        for (auto& r : a.const_coeff->rows)
            t.row(fmt(r.xi_norm), fmt(std::max({r.l[0], r.l[1], r.l[2]})), fmt(std::max(r.m[0], r.m[1])),
                  fmt(r.garding_im));
    }
    if (a.gaps) {
        t.title(name + " regularized roots");
        t.row("xi_norm", "min_gap", "max_shift");
        for (auto& r : a.gaps->rows) t.row(fmt(r.xi_norm), fmt(r.min_gap), fmt(r.max_shift));
    }
    if (a.growth) {
        t.title(name + " growth (" + std::string(to_string(a.growth->verdict)) + ", kappa " + fmt(a.growth->kappa) + ")");
        t.row("xi_norm", "log_amp", "resid_poly", "resid_exp");
        for (auto& r : a.growth->rows) t.row(fmt(r.xi_norm), fmt(r.log_amp), fmt(r.resid_poly), fmt(r.resid_exp));
    }
    if (a.energy) {
        t.title(name + " energy (eta " + fmt(a.energy->eta) + ")");
        t.row("xi_norm", "rate_over_K", "max_dlogE", "K_min");
        for (auto& r : a.energy->rows) t.row(fmt(r.xi_norm), fmt(r.rate_over_K), fmt(r.max_dlogE), fmt(r.K_min));
    }
    if (a.second_order) {
        t.title(name + " second order");
        t.row("xi_norm", "Ia", "Ib");
        for (auto& r : a.second_order->rows) t.row(fmt(r.xi_norm), fmt(r.values.Ia), fmt(r.values.Ib));
    }
    if (!checks.empty()) {
        t.title(name + " expectations");
        t.row("key", "expected", "observed", "passed");
        for (auto& c : checks) t.row(c.key, c.expected, c.observed, c.passed ? "yes" : "NO");
    }
}

// ---------------------------------------------------------------------------
// output

int emit(const Args& a, json document, const Tables& t, double wall) {
    document["wall_clock"] = {{"seconds", wall}};
    const std::string text = document.dump(2) + "\n";
    const bool want_doc = a.format == "doc" || a.format == "both";
    const bool want_tables = a.format == "tables" || a.format == "both";
    if (want_tables) std::cout << t.os.str();
    if (want_doc) {
        if (!a.out.empty()) {
            std::ofstream f(a.out, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + a.out);
            f << text;
        } else {
            std::cout << text;
        }
    }
    return 0;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// check, modes and battery share this: analyze selected operators, compare expectations.
int run_analysis(const Args& a, const std::string& command, const std::set<Part>& fixed, bool expectations_decide) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunOptions o = options(a);
    json document;
    document["config"] = config_doc(a, command);
    json ops = json::array();
    Tables t;
    bool pass = true, numeric_ok = true;
    for (auto& spec : selected(a)) {
        std::set<Part> parts = fixed;
        if (expectations_decide) {
            const auto more = parts_for(spec.expect);
            parts.insert(more.begin(), more.end());
        }
        const Analysis an = analyze(spec.op, parts, o);
        numeric_ok &= quadrature_converged(an);
        // without a full run, only expectations on computed parts are compared
        std::map<std::string, std::string> relevant;
        for (auto& [k, v] : spec.expect) {
            const auto need = parts_for({{k, v}});
            if (std::all_of(need.begin(), need.end(), [&](Part p) { return parts.count(p) > 0; })) relevant[k] = v;
        }
        const auto checks = check_expectations(relevant, an);
        pass &= all_passed(checks);
        json j;
        j["name"] = spec.op.name;
        j["operator"] = format_operator(OperatorSpec{spec.op, {}});
        j["analysis"] = doc(an);
        j["expectations"] = doc(checks);
        j["passed"] = all_passed(checks);
        ops.push_back(j);
        tables(t, spec.op.name, an, checks);
    }
    document["operators"] = ops;
    document["passed"] = pass;
    document["quadrature_converged"] = numeric_ok;
    emit(a, document, t, seconds_since(t0));
    if (!numeric_ok) return kNumerical;
    return pass ? kPass : kMismatch;
}

int cmd_identities(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    json document;
    document["config"] = config_doc(a, "identities");
    Tables t;
    bool pass = true;
    json alg = json::array();
    t.title("algebraic identities");
    t.row("identity", "max_rel", "tol", "samples", "passed");
    for (auto& s : algebraic_identities(a.samples, a.seed, {a.corrupt_discriminant})) {
        alg.push_back({{"name", s.name}, {"max_rel", num(s.max_rel)}, {"tol", s.tol}, {"samples", s.samples},
                       {"passed", s.passed}});
        t.row(s.name, fmt(s.max_rel), fmt(s.tol), s.samples, s.passed ? "yes" : "NO");
        pass &= s.passed;
    }
    document["algebraic"] = alg;
    // operator identities along trajectories with random initial data
    json traj = json::array();
    constexpr double kTrajectoryTol = 1e-6;
    if (a.samples > 0) {
        std::mt19937_64 g(a.seed);
        std::vector<OperatorSpec> ops;
        if (!a.config.empty() || a.battery_flag) ops = selected(a);
        else
            for (auto& s : battery())
                if (s.op.order == 3 && !s.op.has_constant_coefficients()) ops.push_back(s);
        t.title("trajectory identities");
        t.row("operator", "xi_norm", "identity", "rel", "passed");
        for (auto& spec : ops) {
            if (spec.op.order != 3) continue;
            for (double xi : {4.0, 8.0}) {
                const State3 init{cplx(uniform(g, -1, 1), uniform(g, -1, 1)), cplx(uniform(g, -1, 1), uniform(g, -1, 1)),
                                  cplx(uniform(g, -1, 1), uniform(g, -1, 1))};
                const auto res = trajectory_identities(spec.op, scaled(options(a).dir(spec.op.dimension), xi), init,
                                                       a.grid > 0 ? a.grid : 8192);
                for (auto& r : res) {
                    const bool ok = r.rel < kTrajectoryTol;
                    pass &= ok;
                    traj.push_back({{"operator", spec.op.name}, {"xi_norm", xi}, {"identity", r.name},
                                    {"rel", num(r.rel)}, {"max_abs", num(r.max_abs)}, {"passed", ok}});
                    t.row(spec.op.name, fmt(xi), r.name, fmt(r.rel), ok ? "yes" : "NO");
                }
            }
        }
    }
    document["trajectory"] = traj;
    document["passed"] = pass;
    emit(a, document, t, seconds_since(t0));
    return pass ? kPass : kMismatch;
}

std::vector<double> parse_direction(const std::string& s) {
    std::vector<double> d;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad --direction component '" + item + "'");
        }
        if (detail::trim(item.substr(used)) != "") throw ConfigError("bad --direction component '" + item + "'");
        d.push_back(v);
    }
    return d;
}

void add_common(CLI::App* c, Args& a, std::string& dir) {
    c->add_option("--config", a.config, "operator file")->check(CLI::ExistingFile);
    c->add_option("--battery", a.battery, "built-in operator(s); no name means all")->expected(0, -1);
    c->add_option("--xi-min", a.xi_min, "smallest |xi| on the ladder")->check(CLI::PositiveNumber);
    c->add_option("--xi-max", a.xi_max, "largest |xi| on the ladder")->check(CLI::PositiveNumber);
    c->add_option("--xi-steps", a.xi_steps, "ladder points")->check(CLI::Range(2, 64));
    c->add_option("--direction", dir, "unit direction, comma separated");
    c->add_option("--grid", a.grid, "time grid points")->check(CLI::Range(16, 1 << 20));
    c->add_option("--eta", a.eta, "energy weight override (0 calibrates)")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", a.seed, "random seed");
    c->add_option("--out", a.out, "write the JSON document here");
    c->add_option("--format", a.format, "doc, tables or both")->check(CLI::IsMember({"doc", "tables", "both"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levi conditions, mode experiments and identity suites for third-order weakly hyperbolic operators"};
    app.require_subcommand(1);
    Args a;
    std::string dir;
    auto* check = app.add_subcommand("check", "condition integrals, pointwise conditions, constant-coefficient tests");
    check->alias("conditions");
    auto* modes = app.add_subcommand("modes", "growth fits, energy witness, oscillation counts");
    modes->add_flag("--cross-check", a.cross_check, "also compute the condition verdicts");
    auto* ident = app.add_subcommand("identities", "randomized algebraic and trajectory identity suites");
    ident->add_option("--samples", a.samples, "random cubics")->check(CLI::NonNegativeNumber);
    ident->add_flag("--corrupt-discriminant", a.corrupt_discriminant)->group("");
    auto* bat = app.add_subcommand("battery", "every built-in operator against its declared expectations");
    for (auto* c : {check, modes, ident, bat}) add_common(c, a, dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }
    try {
        for (auto* c : {check, modes, ident, bat})
            if (*c && c->count("--battery") > 0) a.battery_flag = true;
        if (!dir.empty()) a.direction = parse_direction(dir);
        if (a.xi_max < a.xi_min) throw ConfigError("--xi-max must be at least --xi-min");
        if (*check)
            return run_analysis(a, "check",
                                {Part::conditions, Part::pointwise, Part::const_coeff, Part::second_order}, a.battery_flag);
        if (*modes) {
            std::set<Part> p{Part::growth, Part::energy, Part::oscillation};
            if (a.cross_check) p.insert(Part::conditions);
            return run_analysis(a, "modes", p, false);
        }
        if (*ident) return cmd_identities(a);
        if (*bat) {
            a.battery_flag = a.battery_flag || a.config.empty();
            return run_analysis(a, "battery", {}, true);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const HyperbolicityViolation& e) {
        std::cerr << "numerical failure: " << e.what() << " (t = " << e.t() << ", |xi| = " << e.xi_norm() << ")\n";
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}
