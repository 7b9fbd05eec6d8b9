#include "fptsim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fptsim/bounds.hpp"
#include "fptsim/config.hpp"
#include "fptsim/errors.hpp"
#include "fptsim/experiments.hpp"
#include "fptsim/rng.hpp"
#include "fptsim/walk.hpp"
#include "json.hpp"

namespace fptsim {

using ojson = nlohmann::ordered_json;

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open output file '" + tmp.string() + "'");
        os << content;
        os.close();
        if (!os) throw ConfigError("cannot write output file '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at '" + path + "'");
    }
}

namespace {

constexpr const char* kVersion = FPTSIM_VERSION;

struct Provenance {
    std::string digest;
    std::optional<std::uint64_t> master_seed;

    std::string csv_header() const {
        return "# fptsim " + std::string(kVersion) + " config_digest=" + digest + " master_seed=" +
               (master_seed ? std::to_string(*master_seed) : std::string("none")) + "\n";
    }
    ojson json_header() const {
        ojson h;
        h["tool"] = "fptsim";
        h["tool_version"] = kVersion;
        h["config_digest"] = digest;
        if (master_seed)
            h["master_seed"] = *master_seed;
        else
            h["master_seed"] = nullptr;
        return h;
    }
};

ojson real_json(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

ojson extended_json(const ExtendedReal& x) { return x.is_finite() ? ojson(x.value()) : ojson("inf"); }

std::string join(std::initializer_list<std::string> fields) {
    std::string line;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) line += ',';
        line += f;
        first = false;
    }
    return line + "\n";
}

// Common flags of the config-driven commands.
struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<unsigned> workers;
};

void add_common(CLI::App& sub, CommonFlags& f, const std::string& tol_help) {
    sub.add_option("--config", f.config, "Experiment config file (JSON)")->required();
    sub.add_option("--seed", f.seed, "Override run.master_seed");
    sub.add_option("--reps", f.reps, "Override run.reps")->check(CLI::PositiveNumber);
    sub.add_option("--out", f.out, "Write the JSON report here instead of output.report or stdout");
    sub.add_option("--tol", f.tol, tol_help)->check(CLI::NonNegativeNumber);
    sub.add_option("--workers", f.workers, "Override run.workers (wall time only)")->check(CLI::PositiveNumber);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("unreadable config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad()) throw std::ios_base::failure("unreadable config: cannot read '" + path + "'");
    return ss.str();
}

ExperimentConfig load(const CommonFlags& f) {
    ExperimentConfig cfg = parse_config(read_file(f.config));
    if (f.seed) cfg.run.master_seed = *f.seed;
    if (f.reps) cfg.run.reps = *f.reps;
    if (f.workers) cfg.run.workers = *f.workers;
    if (f.out) cfg.output.report = *f.out;
    return cfg;
}

RunOptions run_options(const ExperimentConfig& cfg) {
    return RunOptions{.reps = cfg.run.reps, .master_seed = cfg.run.master_seed, .workers = cfg.run.workers};
}

ojson report_skeleton(const ExperimentConfig& cfg, const std::string& command) {
    ojson r;
    r["header"] = Provenance{cfg.digest, cfg.run.master_seed}.json_header();
    r["command"] = command;
    r["config"] = cfg.text;
    r["replications"] = cfg.run.reps;
    return r;
}

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out) {
    if (path)
        write_atomic(*path, content);
    else
        out << content;
}

void emit_json(const std::optional<std::string>& path, const ojson& doc, std::ostream& out) {
    emit(path, doc.dump(2) + "\n", out);
}

const IncrementSpec& need_distribution(const ExperimentConfig& cfg) {
    if (!cfg.distribution) throw ConfigError("config: missing block 'distribution'");
    return *cfg.distribution;
}

ojson bound_json(const RateBound& b) {
    ojson j;
    j["bound_proof"] = real_json(b.bound_proof);
    j["bound_statement"] = real_json(b.bound_statement);
    j["C1_used"] = b.c1_used;
    j["C1_tilde"] = b.c1_tilde;
    return j;
}

// ---- simulate ----

int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
    const ExperimentConfig cfg = load(flags);
    const IncrementSpec& spec = need_distribution(cfg);
    if (!cfg.walk) throw ConfigError("config: missing block 'walk'");
    const StepBoundary b = cfg.walk->boundary(spec.drift());
    const std::size_t reps = cfg.run.reps;
    std::vector<PassageOutcome> outcomes(reps);
    parallel_replications(reps, cfg.run.workers, [&](std::size_t r) {
        outcomes[r] = first_passage(spec, b, derive_seed(cfg.run.master_seed, r), PassageHorizon::full);
    });

    const Provenance prov{cfg.digest, cfg.run.master_seed};
    const std::optional<std::string> samples = cfg.output.samples ? cfg.output.samples : cfg.output.csv;
    if (samples) {
        std::string csv = prov.csv_header() + "rep,tau,censored,crossing_level";
        for (std::size_t l = 1; l <= b.size(); ++l) csv += ",smax_N" + std::to_string(l);
        csv += "\n";
        for (std::size_t r = 0; r < reps; ++r) {
            const PassageOutcome& o = outcomes[r];
            csv += std::to_string(r) + "," + (o.tau ? std::to_string(*o.tau) : std::string()) + "," +
                   (o.censored() ? "1" : "0") + "," + (o.crossing_level ? format_real(*o.crossing_level) : "");
            for (double m : o.max_at_checkpoints) csv += "," + format_real(m);
            csv += "\n";
        }
        write_atomic(*samples, csv);
    }

    std::map<std::int64_t, std::size_t> counts;
    std::size_t censored = 0;
    double tau_sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.tau) {
            ++counts[*o.tau];
            tau_sum += static_cast<double>(*o.tau);
        } else {
            ++censored;
        }
    }
    ojson report = report_skeleton(cfg, "simulate");
    ojson res;
    res["horizon"] = b.horizon();
    res["checkpoints"] = std::vector<std::int64_t>(b.checkpoints().begin(), b.checkpoints().end());
    res["levels"] = std::vector<double>(b.levels().begin(), b.levels().end());
    res["drift"] = spec.drift();
    const std::size_t crossed = reps - censored;
    res["censored_mass"] = static_cast<double>(censored) / static_cast<double>(reps);
    res["numeric_mass"] = static_cast<double>(crossed) / static_cast<double>(reps);
    res["mean_tau_uncensored"] = crossed ? ojson(tau_sum / static_cast<double>(crossed)) : ojson(nullptr);
    ojson hist = ojson::array();
    for (const auto& [tau, c] : counts) hist.push_back({tau, c});
    res["tau_counts"] = std::move(hist);
    report["results"] = std::move(res);
    emit_json(cfg.output.report, report, out);
    return exit_ok;
}

// ---- joint ----

int cmd_joint(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = load(flags);
    const IncrementSpec& spec = need_distribution(cfg);
    if (!cfg.joint) throw ConfigError("config: missing block 'joint'");
    const Theorem1Report rep = run_theorem1(spec, cfg.joint->checkpoints, cfg.joint->u_axes, run_options(cfg),
                                            cfg.run.mvn_tol, cfg.bound.C1);
    const std::optional<double> tol = flags.tol ? flags.tol : cfg.run.sup_discrepancy;
    const bool passed = !tol || rep.sup_discrepancy <= *tol;

    const Provenance prov{cfg.digest, cfg.run.master_seed};
    if (cfg.output.csv) {
        std::string csv = prov.csv_header();
        for (std::size_t l = 1; l <= rep.checkpoints.size(); ++l) csv += "u" + std::to_string(l) + ",";
        csv += "empirical,theory,abs_diff,std_error\n";
        for (const auto& p : rep.points) {
            for (double u : p.u) csv += format_real(u) + ",";
            csv += join({format_real(p.empirical), format_real(p.theory), format_real(p.abs_diff),
                         format_real(p.std_error)});
        }
        write_atomic(*cfg.output.csv, csv);
    }

    ojson report = report_skeleton(cfg, "joint");
    ojson res;
    res["checkpoints"] = rep.checkpoints;
    res["drift"] = spec.drift();
    ojson pts = ojson::array();
    for (const auto& p : rep.points) {
        ojson q;
        ojson u = ojson::array();
        for (double x : p.u) u.push_back(real_json(x));
        q["u"] = std::move(u);
        q["empirical"] = p.empirical;
        q["theory"] = p.theory;
        q["abs_diff"] = p.abs_diff;
        q["std_error"] = p.std_error;
        pts.push_back(std::move(q));
    }
    res["points"] = std::move(pts);
    res["sup_discrepancy"] = rep.sup_discrepancy;
    res["max_std_error"] = rep.max_std_error;
    res["bound"] = bound_json(rep.bound);
    res["threshold"] = tol ? ojson(*tol) : ojson(nullptr);
    res["passed"] = passed;
    report["results"] = std::move(res);
    emit_json(cfg.output.report, report, out);
    if (!passed) {
        err << "threshold violated: sup discrepancy " << format_real(rep.sup_discrepancy) << " > "
            << format_real(*tol) << "\n";
        return exit_threshold;
    }
    return exit_ok;
}

// ---- compare ----

int cmd_compare(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = load(flags);
    const IncrementSpec& spec = need_distribution(cfg);
    if (!cfg.walk) throw ConfigError("config: missing block 'walk'");
    if (!cfg.compare) throw ConfigError("config: missing block 'compare'");
    const StepBoundary b = cfg.walk->boundary(spec.drift());
    const CompareConfig& cmp = *cfg.compare;
    if (cmp.index > b.size()) throw ConfigError("compare.index: exceeds the number of checkpoints");
    const LimitLaw law(cmp.law.kind, profile_from_law(cmp.law), cmp.index, cfg.run.mvn_tol);
    const Theorem2Report rep = run_theorem2(spec, b, law, cmp.index, run_options(cfg));
    const EmpiricalCdf ecdf(rep.normalized);
    const std::optional<double> tol = flags.tol ? flags.tol : cfg.run.ks;
    const bool passed = !tol || rep.ks.distance <= *tol;

    const Provenance prov{cfg.digest, cfg.run.master_seed};
    std::vector<double> ecdf_grid, law_grid;
    for (double u : cmp.curve_grid) {
        ecdf_grid.push_back(ecdf(u));
        law_grid.push_back(law.cdf(u));
    }
    if (cfg.output.csv) {
        std::string csv = prov.csv_header() + "u,ecdf,law,abs_diff\n";
        for (std::size_t k = 0; k < cmp.curve_grid.size(); ++k)
            csv += join({format_real(cmp.curve_grid[k]), format_real(ecdf_grid[k]), format_real(law_grid[k]),
                         format_real(std::fabs(ecdf_grid[k] - law_grid[k]))});
        write_atomic(*cfg.output.csv, csv);
    }
    if (cfg.output.samples) {
        std::string csv = prov.csv_header() + "rep,tau,normalized_tau,censored\n";
        for (std::size_t r = 0; r < rep.taus.size(); ++r)
            csv += join({std::to_string(r), rep.taus[r] ? std::to_string(*rep.taus[r]) : std::string(),
                         rep.normalized[r] ? format_real(*rep.normalized[r]) : std::string(),
                         rep.taus[r] ? "0" : "1"});
        write_atomic(*cfg.output.samples, csv);
    }

    ojson report = report_skeleton(cfg, "compare");
    ojson res;
    res["checkpoints"] = std::vector<std::int64_t>(b.checkpoints().begin(), b.checkpoints().end());
    res["levels"] = std::vector<double>(b.levels().begin(), b.levels().end());
    res["index"] = cmp.index;
    res["law"] = to_string(cmp.law.kind);
    ojson prof;
    ojson V = ojson::array(), D = ojson::array();
    for (const auto& v : law.profile().V) V.push_back(extended_json(v));
    for (const auto& d : law.profile().Delta) D.push_back(extended_json(d));
    prof["V"] = std::move(V);
    prof["Delta"] = std::move(D);
    prof["adjacent_lambda"] = law.profile().adjacent_lambda;
    prof["alpha"] = law.profile().alpha;
    res["profile"] = std::move(prof);
    ojson ks;
    ks["distance"] = rep.ks.distance;
    ks["law_lower_mass"] = rep.ks.law_lower_mass;
    ks["law_upper_mass"] = rep.ks.law_upper_mass;
    ks["law_deficit"] = rep.ks.law_deficit;
    ks["empirical_censored"] = rep.ks.empirical_censored;
    res["ks"] = std::move(ks);
    ojson gaps = ojson::array();
    for (const auto& g : rep.gaps) {
        ojson q;
        q["gap"] = g.gap;
        q["lower"] = g.lower;
        q["upper"] = g.upper;
        q["empirical_mass"] = g.empirical;
        gaps.push_back(std::move(q));
    }
    res["gap_masses"] = std::move(gaps);
    ojson e;
    e["censored_mass"] = ecdf.censored_mass();
    e["numeric_mass"] = ecdf.numeric_mass();
    e["u"] = cmp.curve_grid;
    e["value"] = ecdf_grid;
    res["ecdf"] = std::move(e);
    res["threshold"] = tol ? ojson(*tol) : ojson(nullptr);
    res["passed"] = passed;
    report["results"] = std::move(res);
    emit_json(cfg.output.report, report, out);
    if (!passed) {
        err << "threshold violated: KS distance " << format_real(rep.ks.distance) << " > " << format_real(*tol)
            << "\n";
        return exit_threshold;
    }
    return exit_ok;
}

// ---- sweep ----

int cmd_sweep(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = load(flags);
    const IncrementSpec& spec = need_distribution(cfg);
    if (!cfg.sweep) throw ConfigError("config: missing block 'sweep'");
    const SweepConfig& sw = *cfg.sweep;
    const SweepReport rep =
        convergence_sweep(spec, sw.fractions, sw.u_axes, sw.n_values, run_options(cfg), cfg.run.mvn_tol, cfg.bound.C1);
    const bool passed = !sw.slope_range || (rep.fitted_slope >= sw.slope_range->first &&
                                            rep.fitted_slope <= sw.slope_range->second);

    const Provenance prov{cfg.digest, cfg.run.master_seed};
    if (cfg.output.csv) {
        std::string csv = prov.csv_header() + "n,sup_discrepancy,max_std_error,bound_proof\n";
        for (const auto& row : rep.rows)
            csv += join({std::to_string(row.n), format_real(row.sup_discrepancy), format_real(row.max_std_error),
                         format_real(row.bound_proof)});
        write_atomic(*cfg.output.csv, csv);
    }
    ojson report = report_skeleton(cfg, "sweep");
    ojson res;
    ojson rows = ojson::array();
    for (const auto& row : rep.rows) {
        ojson q;
        q["n"] = row.n;
        q["checkpoints"] = row.checkpoints;
        q["sup_discrepancy"] = row.sup_discrepancy;
        q["max_std_error"] = row.max_std_error;
        q["bound_proof"] = real_json(row.bound_proof);
        rows.push_back(std::move(q));
    }
    res["rows"] = std::move(rows);
    res["fitted_slope"] = real_json(rep.fitted_slope);
    res["slope_range"] = sw.slope_range ? ojson({sw.slope_range->first, sw.slope_range->second}) : ojson(nullptr);
    res["C1_used"] = cfg.bound.C1;
    res["passed"] = passed;
    report["results"] = std::move(res);
    emit_json(cfg.output.report, report, out);
    if (!passed) {
        err << "threshold violated: fitted slope " << format_real(rep.fitted_slope) << " outside ["
            << format_real(sw.slope_range->first) << ", " << format_real(sw.slope_range->second) << "]\n";
        return exit_threshold;
    }
    return exit_ok;
}

// ---- limit ----

struct LimitFlags {
    std::string law;
    std::vector<std::string> V, Delta;
    std::vector<double> alpha, lambda;
    std::size_t index = 1;
    std::string grid;
    double tol = 1e-6;
    std::optional<std::string> out;
};

std::vector<ExtendedReal> extended_list(const std::vector<std::string>& items) {
    std::vector<ExtendedReal> out;
    for (const auto& s : items) out.push_back(parse_extended(s));
    return out;
}

std::string invocation_digest(const std::vector<std::string>& args) {
    std::string joined;
    for (const auto& a : args) joined += a + '\0';
    return content_digest(joined);
}

int cmd_limit(const LimitFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    LawConfig lc;
    lc.kind = parse_law_kind(f.law);
    if (!f.V.empty()) lc.V = extended_list(f.V);
    if (!f.Delta.empty()) lc.Delta = extended_list(f.Delta);
    if (!f.alpha.empty()) lc.alpha = f.alpha;
    if (!f.lambda.empty()) lc.lambda = f.lambda;
    const LimitProfile profile = profile_from_law(lc);
    if (f.index < 1 || f.index > profile.size()) throw ConfigError("--index: out of range for the given V");
    const LimitLaw law(lc.kind, profile, f.index, f.tol);
    // Branch labels come from the general evaluator on the same profile.
    std::optional<LimitLaw> brancher;
    if (lc.kind != LawKind::wald && lc.kind != LawKind::renewal)
        brancher.emplace(LawKind::theorem2, profile, f.index, f.tol);

    std::string csv = Provenance{invocation_digest(args), std::nullopt}.csv_header() + "u,G_value,branch_j\n";
    for (double u : parse_grid(f.grid)) {
        const LawValue v = law.evaluate(u);
        std::size_t branch = v.branch;
        if (brancher && lc.kind != LawKind::theorem2) branch = brancher->evaluate(u).branch;
        csv += join({format_real(u), format_real(v.value), std::to_string(branch)});
    }
    emit(f.out, csv, out);
    return exit_ok;
}

// ---- bound ----

struct BoundFlags {
    std::optional<std::size_t> k;
    std::vector<std::int64_t> N;
    double beta3 = 0.0, a = 0.0, Eabs = 0.0;
    double C1 = 1.0, C0 = 0.82;
    std::optional<std::string> out;
};

int cmd_bound(const BoundFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    if (f.k && *f.k != f.N.size()) throw ConfigError("--k: does not match the number of --N values");
    RateBoundConfig cfg;
    cfg.C0 = f.C0;
    cfg.C1 = f.C1;
    cfg.checkpoints = f.N;
    cfg.abs_mean = f.Eabs;
    cfg.beta3 = f.beta3;
    cfg.drift = f.a;
    const RateBound b = theorem3_bound(cfg);
    ojson doc;
    doc["header"] = Provenance{invocation_digest(args), std::nullopt}.json_header();
    const ojson values = bound_json(b);
    for (const auto& [key, value] : values.items()) doc[key] = value;
    emit_json(f.out, doc, out);
    return exit_ok;
}

// ---- oracle ----

struct OracleFlags {
    double p = 0.5;
    std::int64_t n = 0;
    std::optional<double> level;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> levels;
    std::optional<std::string> out;
};

int cmd_oracle(const OracleFlags& f, const std::vector<std::string>& args, std::ostream& out) {
    std::optional<StepBoundary> b;
    if (f.level) {
        if (!f.checkpoints.empty() || !f.levels.empty())
            throw ConfigError("oracle: use either --level or --checkpoints/--levels");
        b.emplace(std::vector<std::int64_t>{f.n}, std::vector<double>{*f.level});
    } else {
        if (f.checkpoints.empty()) throw ConfigError("oracle: --level or --checkpoints/--levels is required");
        b.emplace(f.checkpoints, f.levels);
    }
    const LatticeDistribution d = exact_lattice_distribution(f.p, f.n, *b);
    std::string csv = Provenance{invocation_digest(args), std::nullopt}.csv_header() + "tau,mass\n";
    for (std::size_t j = 0; j < d.tau_mass.size(); ++j)
        csv += join({std::to_string(j + 1), format_real(d.tau_mass[j])});
    csv += join({"censored", format_real(d.censored)});
    emit(f.out, csv, out);
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"First-passage times of positive-drift random walks across step boundaries", "fptsim"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags simulate_f, joint_f, compare_f, sweep_f;
    auto* simulate = app.add_subcommand("simulate", "Simulate first-passage times across the configured boundary");
    add_common(*simulate, simulate_f, "Unused; accepted for uniformity");
    auto* joint = app.add_subcommand("joint", "Joint running-maximum CDF at checkpoints vs the Gaussian ladder law");
    add_common(*joint, joint_f, "Override run.tolerances.sup_discrepancy");
    auto* compare =
        app.add_subcommand("compare", "Normalized first-passage ECDF vs a limiting law (KS and gap masses)");
    add_common(*compare, compare_f, "Override run.tolerances.ks");
    auto* sweep = app.add_subcommand("sweep", "Convergence sweep of the joint-CDF discrepancy over n");
    add_common(*sweep, sweep_f, "Unused; the slope range comes from sweep.slope_range");

    LimitFlags limit_f;
    auto* limit = app.add_subcommand("limit", "Evaluate a limiting law on a grid; CSV u,G_value,branch_j");
    limit->add_option("--law", limit_f.law, "theorem2 | corollary1 | corollary2 | corollary3 | wald | renewal")
        ->required();
    limit->add_option("--V", limit_f.V, "V_1,...,V_m (reals or inf)")->delimiter(',');
    limit->add_option("--Delta", limit_f.Delta, "Delta_1,...,Delta_k0 (reals or inf)")->delimiter(',');
    limit->add_option("--alpha", limit_f.alpha, "Level ratios alpha_1,...,alpha_{m-1} in (0,1]")->delimiter(',');
    limit->add_option("--lambda", limit_f.lambda, "Checkpoint ratios lambda_{j,j+1} in (0,1]; default for alpha")->delimiter(',');
    limit->add_option("--index", limit_f.index, "Law index i (default 1)")->check(CLI::PositiveNumber);
    limit->add_option("--grid", limit_f.grid, "Grid a:b:step")->required();
    limit->add_option("--tol", limit_f.tol, "Gaussian CDF accuracy (default 1e-6)")->check(CLI::PositiveNumber);
    limit->add_option("--out", limit_f.out, "Write the CSV here instead of stdout");

    BoundFlags bound_f;
    auto* bound = app.add_subcommand("bound", "Convergence-rate bound for the joint CDF; JSON");
    bound->add_option("--k", bound_f.k, "Number of checkpoints (checked against --N)");
    bound->add_option("--N", bound_f.N, "Checkpoints N_1,...,N_k")->delimiter(',')->required();
    bound->add_option("--beta3", bound_f.beta3, "Third absolute central moment")->required();
    bound->add_option("--a", bound_f.a, "Drift a > 0")->required();
    bound->add_option("--Eabs", bound_f.Eabs, "E|xi_1|")->required();
    bound->add_option("--C1", bound_f.C1, "Universal constant C1 (default 1)");
    bound->add_option("--C0", bound_f.C0, "Berry-Esseen constant C0 (default 0.82)");
    bound->add_option("--out", bound_f.out, "Write the JSON here instead of stdout");

    OracleFlags oracle_f;
    auto* oracle = app.add_subcommand("oracle", "Exact first-passage law of the +-1 lattice walk; CSV tau,mass");
    oracle->add_option("--p", oracle_f.p, "P(step = +1)")->required();
    oracle->add_option("--n", oracle_f.n, "Horizon n")->required();
    oracle->add_option("--level", oracle_f.level, "Constant integer level");
    oracle->add_option("--checkpoints", oracle_f.checkpoints, "Checkpoints N_1,...,N_k")->delimiter(',');
    oracle->add_option("--levels", oracle_f.levels, "Integer levels g_1,...,g_k")->delimiter(',');
    oracle->add_option("--out", oracle_f.out, "Write the CSV here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return exit_ok;
        }
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    const auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
        if (simulate->parsed())
            code = cmd_simulate(simulate_f, out);
        else if (joint->parsed())
            code = cmd_joint(joint_f, out, err);
        else if (compare->parsed())
            code = cmd_compare(compare_f, out, err);
        else if (sweep->parsed())
            code = cmd_sweep(sweep_f, out, err);
        else if (limit->parsed())
            code = cmd_limit(limit_f, args, out);
        else if (bound->parsed())
            code = cmd_bound(bound_f, args, out);
        else if (oracle->parsed())
            code = cmd_oracle(oracle_f, args, out);
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const InfeasibleTargetError& e) {
        err << "error: infeasible boundary targets: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "error: config schema: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (simulate->parsed() || joint->parsed() || compare->parsed() || sweep->parsed())
        err << "runtime_seconds=" << format_real(seconds) << "\n";
    return code;
}

}  // namespace fptsim
