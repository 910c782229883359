#include "smlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <new>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "smlab/config.hpp"
#include "smlab/error.hpp"
#include "smlab/estimates.hpp"
#include "smlab/report.hpp"

namespace smlab {

namespace fs = std::filesystem;

namespace {

struct RunSettings {
    std::string config_path;
    std::string out;
    int jobs = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
};

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    int jobs = 1;
    std::uint64_t seed = 1;
    std::optional<std::size_t> budget;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Context make_context(const RunSettings& s) {
    Context c;
    if (s.config_path.empty()) throw ConfigError("--config is required");
    c.cfg = ExperimentConfig::load(s.config_path);
    const auto& run = c.cfg.section_or_empty("run");
    run.allow({"seed", "jobs", "out"});
    c.out = s.out.empty() ? fs::path(run.text("out", "out")) : fs::path(s.out);
    c.jobs = s.jobs > 0 ? s.jobs : run.integer("jobs", 1);
    if (c.jobs < 1) run.fail("jobs", "jobs must be at least 1");
    if (s.seed) {
        c.seed = *s.seed;
    } else {
        const int seed = run.integer("seed", 1);
        if (seed < 0) run.fail("seed", "seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(seed);
    }
    c.budget = s.budget;
    return c;
}

// ---------------------------------------------------------------- spaces

Boundary parse_boundary(const ConfigSection& sec) {
    const std::string b = sec.text("boundary", "free");
    if (b == "free") return Boundary::free;
    if (b == "absorbing") return Boundary::absorbing;
    sec.fail("boundary", "boundary must be free or absorbing");
}

int positive_int(const ConfigSection& sec, const std::string& key, int fallback) {
    const int v = sec.integer(key, fallback);
    if (v < 1) sec.fail(key, "key '" + key + "' must be a positive integer");
    return v;
}

SpacePtr build_space(const ConfigSection& sec) {
    sec.allow({"kind", "dim", "side", "spacing", "boundary", "n", "m", "side_small", "side_big", "torus_side",
               "edges", "mu", "compact", "point_budget", "distance_budget", "radii", "volume_crossover"});
    SpaceLimits limits;
    limits.point_budget = static_cast<std::size_t>(positive_int(sec, "point_budget", 20000));
    limits.distance_table_budget = static_cast<std::size_t>(positive_int(sec, "distance_budget", 8000));
    const std::string kind = sec.text("kind");
    const double h = sec.number("spacing", 1.0);
    if (!(h > 0.0)) sec.fail("spacing", "spacing must be positive");
    if (kind == "grid")
        return std::make_shared<const MetricMeasureSpace>(
            build_grid(positive_int(sec, "dim", 1), positive_int(sec, "side", 2), h, parse_boundary(sec), limits));
    if (kind == "torus")
        return std::make_shared<const MetricMeasureSpace>(
            build_torus(positive_int(sec, "dim", 1), positive_int(sec, "side", 3), h, limits));
    if (kind == "ends") {
        EndsModelParams p;
        p.n = positive_int(sec, "n", p.n);
        p.m = positive_int(sec, "m", p.m);
        p.side_small = positive_int(sec, "side_small", p.side_small);
        p.side_big = positive_int(sec, "side_big", p.side_big);
        p.torus_side = positive_int(sec, "torus_side", p.torus_side);
        p.h = h;
        return std::make_shared<const MetricMeasureSpace>(build_ends_model(p, limits));
    }
    if (kind == "custom") {
        std::vector<std::size_t> compact;
        if (sec.has("compact")) compact = sec.indices("compact");
        return std::make_shared<const MetricMeasureSpace>(
            load_custom_space(sec.text("edges"), sec.text("mu"), compact, limits));
    }
    sec.fail("kind", "unknown space kind '" + kind + "' (grid, torus, ends, custom)");
}

// ------------------------------------------------------------- operators

struct OperatorBundle {
    SpacePtr space;
    std::unique_ptr<SelfAdjointOperator> op;
    std::string cache_path;
    bool cache_loaded = false;
};

std::optional<int> lattice_dim(const MetricMeasureSpace& s) {
    if (s.lattice()) return static_cast<int>(s.lattice()->dim());
    return std::nullopt;
}

OperatorBundle build_operator(const Context& ctx, SpacePtr space, const ConfigSection& sec) {
    sec.allow({"kind", "coupling", "cutoff", "murata_dim", "allow_shift", "eigen_budget", "cache_dir", "eps"});
    OperatorBundle b;
    b.space = space;
    OperatorLimits limits;
    limits.eigen_budget = static_cast<std::size_t>(positive_int(sec, "eigen_budget", 6000));
    if (ctx.budget) limits.eigen_budget = *ctx.budget;
    const std::string kind = sec.text("kind", "laplacian");
    if (kind == "laplacian") {
        b.op = std::make_unique<SelfAdjointOperator>(laplacian(space, limits));
    } else if (kind == "schrodinger") {
        PotentialSpec pot;
        pot.coupling = sec.number("coupling");
        pot.cutoff = sec.number("cutoff", pot.cutoff);
        SchrodingerOptions so;
        so.limits = limits;
        if (sec.has("murata_dim")) so.murata_dim = positive_int(sec, "murata_dim", 3);
        so.allow_shift = sec.flag("allow_shift", false);
        b.op = std::make_unique<SelfAdjointOperator>(schrodinger(space, pot, so));
    } else {
        sec.fail("kind", "unknown operator kind '" + kind + "' (laplacian, schrodinger)");
    }
    if (sec.has("cache_dir")) {
        std::ostringstream name;
        name << "op_" << std::hex << std::setw(16) << std::setfill('0') << b.op->content_hash() << ".eig";
        const fs::path dir = sec.text("cache_dir");
        b.cache_path = (dir / name.str()).string();
        b.cache_loaded = load_eigensystem(b.cache_path, *b.op);
    }
    return b;
}

void store_cache(const OperatorBundle& b) {
    if (b.cache_path.empty() || b.cache_loaded || !b.op->has_eigensystem()) return;
    fs::create_directories(fs::path(b.cache_path).parent_path());
    save_eigensystem(b.cache_path, *b.op);
}

OperatorBundle main_operator(const Context& ctx) {
    return build_operator(ctx, build_space(ctx.cfg.section("space")), ctx.cfg.section_or_empty("operator"));
}

// Second model for suites that compare two sizes; same operator settings.
OperatorBundle refined_operator(const Context& ctx, const std::string& suite) {
    if (!ctx.cfg.has("space_refined"))
        throw ConfigError(ctx.cfg.source() + ": suite " + suite + " needs a [space_refined] section");
    return build_operator(ctx, build_space(ctx.cfg.section("space_refined")), ctx.cfg.section_or_empty("operator"));
}

// ------------------------------------------------------------ multipliers

const std::set<std::string> kMultiplierKeys = {"family", "table", "table_tol", "value", "xi",         "sigma",
                                               "delta",  "a",     "center",    "half_width"};

MultiplierFunction multiplier_from_section(const ConfigSection& sec) {
    if (sec.has("table")) {
        if (sec.has("family")) sec.fail("table", "give either family or table, not both");
        return load_tabulated(sec.text("table"), sec.number("table_tol", 1e-8));
    }
    const std::string family = sec.text("family");
    std::map<std::string, double> params;
    for (const auto& name : multiplier_param_names(family)) params[name] = sec.number(name);
    return multiplier_from_params(family, params);
}

std::set<std::string> with_keys(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

void apply_window(const ConfigSection& sec, std::optional<double>& lo, std::optional<double>& hi) {
    lo = sec.optional_number("window_lo");
    hi = sec.optional_number("window_hi");
}

Interval interval(const ConfigSection& sec, const std::string& lo, const std::string& hi, Interval fallback) {
    Interval w{sec.number(lo, fallback.lo), sec.number(hi, fallback.hi)};
    if (!(w.lo > 0.0 && w.hi > w.lo)) sec.fail(lo, "window needs 0 < " + lo + " < " + hi);
    return w;
}

// ------------------------------------------------------------------ suites

SuiteReport run_suite(const Context& ctx, const std::string& name) {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
        std::string list;
        for (const auto& s : known) list += (list.empty() ? "" : ", ") + s;
        throw ConfigError("unknown suite '" + name + "' (known: " + list + ")");
    }
    const ConfigSection& sec = ctx.cfg.section_or_empty("suite." + name);
    const Tolerances tol = sec.tolerances();

    if (name == "subordination") {
        sec.allow({"a", "xi", "quad_tol"}, true);
        SubordinationOptions o;
        o.quad_tol = sec.number("quad_tol", o.quad_tol);
        o.tolerances = tol;
        return suite_subordination(sec.grid("a"), sec.grid("xi", true), o, ctx.jobs);
    }

    auto main = main_operator(ctx);
    const SelfAdjointOperator& op = *main.op;
    SuiteReport report;

    if (name == "rsk") {
        sec.allow({"t", "sigma", "kappa", "window_lo", "window_hi"}, true);
        RskOptions o;
        o.sigma = sec.number("sigma", o.sigma);
        o.kappa = sec.number("kappa", o.kappa);
        apply_window(sec, o.window_lo, o.window_hi);
        o.tolerances = tol;
        report = suite_rsk(op, sec.grid("t"), o, ctx.jobs);
    } else if (name == "heat2inf") {
        sec.allow({"t", "sigma", "kappa", "window_lo", "window_hi", "doubling"}, true);
        Heat2InfOptions o;
        o.kappa = sec.number("kappa", o.kappa);
        o.sigma = sec.number("sigma", o.sigma);
        o.doubling = sec.flag("doubling", o.doubling);
        apply_window(sec, o.window_lo, o.window_hi);
        o.tolerances = tol;
        report = suite_heat2inf(op, sec.grid("t"), o, ctx.jobs);
    } else if (name == "ondiag") {
        sec.allow({"t", "n", "m", "small_lo", "small_hi", "large_lo", "large_hi"}, true);
        OnDiagOptions o;
        o.n = sec.number("n", o.n);
        o.m = sec.number("m", o.m);
        o.small_window = interval(sec, "small_lo", "small_hi", o.small_window);
        o.large_window = interval(sec, "large_lo", "large_hi", o.large_window);
        o.tolerances = tol;
        report = suite_ondiag(op, sec.grid("t"), o);
    } else if (name == "wave") {
        sec.allow({"t", "xi", "sigma", "kappa", "xi_fit_min"}, true);
        WaveOptions o;
        o.sigma = sec.number("sigma", o.sigma);
        o.kappa = sec.number("kappa", o.kappa);
        o.xi_fit_min = sec.number("xi_fit_min", o.xi_fit_min);
        o.tolerances = tol;
        report = suite_wave(op, sec.grid("xi", true), sec.grid("t"), o, ctx.jobs);
    } else if (name == "multiplier") {
        sec.allow(with_keys({"t", "s", "sigma", "kappa", "dyadic_levels"}, kMultiplierKeys), true);
        MultiplierSuiteOptions o;
        o.s = sec.number("s", o.s);
        o.sigma = sec.number("sigma", o.sigma);
        o.kappa = sec.number("kappa", o.kappa);
        o.dyadic_levels = sec.integer("dyadic_levels", o.dyadic_levels);
        o.tolerances = tol;
        const auto f = multiplier_from_section(sec);
        auto large = refined_operator(ctx, name);
        report = suite_multiplier(op, *large.op, f, sec.grid("t"), o, ctx.jobs);
        store_cache(large);
    } else if (name == "resolvent_sector") {
        sec.allow({"radii", "angles", "sigma", "kappa"}, true);
        SectorOptions o;
        o.sigma = sec.number("sigma", o.sigma);
        o.kappa = sec.number("kappa", o.kappa);
        o.tolerances = tol;
        const auto angles = sec.grid("angles", true);
        if (angles.back() >= std::acos(-1.0) / 2.0) sec.fail("angles", "angles must lie in [0, pi/2)");
        auto fine = refined_operator(ctx, name);
        report = suite_resolvent_sector(op, *fine.op, sector_samples(sec.grid("radii"), angles), o, ctx.jobs);
        store_cache(fine);
    } else if (name == "spectrum_probe") {
        sec.allow({"rho", "gap", "sigma", "kappa", "eps"}, true);
        SpectrumProbeOptions o;
        o.sigma = sec.number("sigma", o.sigma);
        o.kappa = sec.number("kappa", o.kappa);
        o.eps = sec.number("eps", o.eps);
        o.tolerances = tol;
        const double gap = sec.number("gap");
        if (!(gap > 0.0)) sec.fail("gap", "gap must be positive");
        report = suite_spectrum_probe(op, sec.number("rho"), gap, o);
    } else if (name == "schrodinger") {
        sec.allow({"t", "alpha", "n", "eps", "window_lo", "window_hi"}, true);
        if (!op.potential()) throw ConfigError("suite schrodinger needs [operator] kind = schrodinger");
        SchrodingerSuiteOptions o;
        const auto& osec = ctx.cfg.section_or_empty("operator");
        const auto dim = osec.has("murata_dim") ? std::optional<int>(osec.integer("murata_dim", 3))
                                                : lattice_dim(op.space());
        if (!dim && !sec.has("n")) sec.fail("n", "suite schrodinger needs n for a non-lattice space");
        o.n = sec.number("n", dim ? double(*dim) : 0.0);
        if (sec.has("alpha")) {
            o.alpha = sec.number("alpha");
        } else {
            // Decay exponent of the zero resonance of -Delta - c/|x|^2.
            const double half = (o.n - 2.0) / 2.0, c = op.potential()->spec.coupling;
            if (!(half * half - c >= 0.0)) sec.fail("alpha", "coupling exceeds ((n-2)/2)^2; give alpha");
            o.alpha = half - std::sqrt(half * half - c);
        }
        o.eps = sec.number("eps", o.eps);
        o.window = interval(sec, "window_lo", "window_hi", o.window);
        o.tolerances = tol;
        const auto reference = laplacian(main.space, op.limits());
        report = suite_schrodinger(op, reference, sec.grid("t"), o);
    } else if (name == "dg") {
        sec.allow({"t", "separations", "radius", "center", "speed", "speed_tau", "speed_mass_tol", "volume_radii",
                   "volume_crossover"},
                  true);
        DgOptions o;
        o.speed = sec.number("speed", o.speed);
        o.speed_tau = sec.grid("speed_tau", o.speed_tau);
        o.speed_mass_tol = sec.number("speed_mass_tol", o.speed_mass_tol);
        o.volume_radii = sec.grid("volume_radii", o.volume_radii);
        o.volume_crossover = sec.number("volume_crossover", o.volume_crossover);
        o.tolerances = tol;
        std::size_t center = 0;
        if (sec.has("center")) {
            const auto c = sec.indices("center");
            if (c.size() != 1) sec.fail("center", "center needs a single point index");
            center = c[0];
        } else if (!op.space().compact().empty()) {
            center = op.space().compact()[0];
        }
        const auto pairs = make_pair_schedule(op.space(), center, sec.grid("separations"), sec.number("radius", 1.0));
        report = suite_dg_decay(op, sec.grid("t"), pairs, o);
    } else if (name == "locality") {
        sec.allow(with_keys({"r", "slack", "speed_tau", "speed_mass_tol"}, kMultiplierKeys), true);
        LocalityOptions o;
        o.slack = sec.number("slack", o.slack);
        o.speed_tau = sec.grid("speed_tau", o.speed_tau);
        o.speed_mass_tol = sec.number("speed_mass_tol", o.speed_mass_tol);
        o.tolerances = tol;
        report = suite_locality(op, multiplier_from_section(sec), sec.grid("r"), o);
    }
    store_cache(main);
    return report;
}

// --------------------------------------------------------------- commands

int cmd_space(const Context& ctx, std::ostream& out) {
    const auto& sec = ctx.cfg.section("space");
    const SpacePtr space = build_space(sec);
    const double diameter = space->diameter();
    std::vector<double> radii;
    if (sec.has("radii")) {
        radii = sec.grid("radii");
    } else {
        for (double r = space->min_length(); r <= diameter; r *= 2.0) radii.push_back(r);
    }
    const auto rows = sup_volume_table(*space, radii);
    // Doubling ratio over radii r with 2r still inside the diameter.
    std::vector<double> dradii;
    for (double r : radii)
        if (2.0 * r <= diameter) dradii.push_back(r);
    const double doubling = dradii.empty() ? 1.0 : doubling_ratio(*space, dradii);

    out << "points         " << space->size() << "\n";
    out << "edges          " << space->edges().size() << "\n";
    out << "total_mass     " << num(space->total_mass()) << "\n";
    out << "diameter       " << num(diameter) << "\n";
    out << "doubling_ratio " << num(doubling) << "\n";
    out << "space_hash     " << std::hex << space->content_hash() << std::dec << "\n";

    std::string csv = "r,sup_volume,argmax_point\n";
    for (const auto& r : rows) csv += num(r.r) + "," + num(r.sup_volume) + "," + std::to_string(r.argmax) + "\n";
    write_atomic(ctx.out / "volume_profile.csv", csv);
    out << "volume profile " << (ctx.out / "volume_profile.csv").string() << "\n";

    const bool is_ends = sec.text("kind") == "ends";
    if (sec.has("volume_crossover") || is_ends) {
        const double crossover = sec.number("volume_crossover", 3.5);
        const auto fit = volume_profile_fit(*space, radii, crossover);
        out << "n_small        " << num(fit.n_small) << "\n";
        out << "n_large        " << num(fit.n_large) << "\n";
        out << "fit_residual   " << num(fit.fit_residual) << "\n";
    }
    return 0;
}

int cmd_op(const Context& ctx, std::ostream& out) {
    auto b = main_operator(ctx);
    const auto& op = *b.op;
    out << "points           " << op.size() << "\n";
    out << "lambda_min       " << num(op.lambda_min()) << "\n";
    out << "lambda_max_bound " << num(op.lambda_max_bound()) << "\n";
    out << "tol_psd          " << num(op.tol_psd()) << "\n";
    if (op.shift() != 0.0) out << "shift            " << num(op.shift()) << "\n";
    int code = op.lambda_min() >= -op.tol_psd() ? 0 : 1;
    if (op.potential()) {
        const double eps = ctx.cfg.section_or_empty("operator").number("eps", 0.1);
        const auto sub = check_subcritical(op, eps);
        out << "subcritical_eps  " << num(eps) << "\n";
        out << "subcritical_min  " << num(sub.min_eig) << "\n";
        out << "subcritical      " << (sub.pass ? "yes" : "no") << "\n";
        if (!sub.pass) code = 1;
    }
    store_cache(b);
    return code;
}

int cmd_suite(const Context& ctx, const std::string& name, std::ostream& out) {
    const SuiteReport r = run_suite(ctx, name);
    for (const auto& p : write_report_files(r, ctx.out, ctx.seed)) out << "wrote " << p.string() << "\n";
    for (const auto& k : r.summary)
        out << "  " << k.name << ": predicted " << num(k.predicted) << ", fitted " << num(k.fitted) << "\n";
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
    out << r.suite << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
    return r.pass ? 0 : 1;
}

int cmd_report(const fs::path& dir, std::ostream& out, std::ostream& err) {
    const Aggregate agg = aggregate_reports(dir);
    for (const auto& w : agg.warnings) err << "warning: " << w << "\n";
    out << aggregate_to_table(agg);
    write_atomic(dir / "summary.json", aggregate_to_json(agg));
    if (agg.rows.empty()) return 0;
    return agg.all_pass() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral multiplier lab"};
    app.name("smlab");
    app.require_subcommand(1);
    app.fallthrough();
    RunSettings s;
    app.add_option("--config", s.config_path, "Experiment file");
    app.add_option("--out", s.out, "Output directory");
    app.add_option("--jobs", s.jobs, "Worker threads")->check(CLI::PositiveNumber);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed recorded in reports");
    std::size_t budget = 0;
    auto* budget_opt = app.add_option("--budget", budget, "Dense eigensolver budget (points)")->check(CLI::PositiveNumber);

    auto* space = app.add_subcommand("space", "Build the space and print its summary");
    auto* op = app.add_subcommand("op", "Build the operator and print its spectral summary");
    auto* suite = app.add_subcommand("suite", "Run one verification suite");
    std::string suite_name;
    suite->add_option("name", suite_name, "Suite name")->required();
    auto* report = app.add_subcommand("report", "Aggregate the JSON reports of a run directory");
    std::string report_dir;
    report->add_option("dir", report_dir, "Run directory")->required();

    std::vector<std::string> argv_store{"smlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config);
    }
    if (seed_opt->count()) s.seed = seed;
    if (budget_opt->count()) s.budget = budget;

    try {
        if (*report) return cmd_report(report_dir, out, err);
        const Context ctx = make_context(s);
        if (*space) return cmd_space(ctx, out);
        if (*op) return cmd_op(ctx, out);
        if (*suite) return cmd_suite(ctx, suite_name, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return static_cast<int>(ExitCode::budget);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::fail);
    }
    return static_cast<int>(ExitCode::config);
}

}  // namespace smlab
