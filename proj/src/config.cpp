#include "fptsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "fptsim/errors.hpp"
#include "json.hpp"

namespace fptsim {

using nlohmann::json;

std::string content_digest(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<std::int64_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::int64_t> integers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

ExtendedReal extended(const json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_extended(v.get<std::string>());
        } catch (const Error&) {
            throw ConfigError(where + ": expected a number or \"inf\"");
        }
    }
    const double x = number(v, where);
    if (std::isnan(x) || x == -INFINITY) throw ConfigError(where + ": value out of range");
    return ExtendedReal(x);
}

std::vector<ExtendedReal> extendeds(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<ExtendedReal> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(extended(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::optional<double>> optional_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_null())
            out.emplace_back();
        else
            out.emplace_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> axes(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (v[i].is_string()) {
            try {
                out.push_back(parse_grid(v[i].get<std::string>()));
            } catch (const Error& e) {
                throw ConfigError(at + ": " + e.what());
            }
        } else {
            out.push_back(numbers(v[i], at));
        }
        if (out.back().empty()) throw ConfigError(at + ": empty axis");
    }
    return out;
}

IncrementSpec parse_distribution(const json& d) {
    reject_unknown(d, "distribution", {"family", "params", "standardize"});
    const json& fam = require(d, "distribution", "family");
    if (!fam.is_string()) throw ConfigError("distribution.family: expected a string");
    Family family;
    try {
        family = parse_family(fam.get<std::string>());
    } catch (const Error& e) {
        throw ConfigError(std::string("distribution.family: ") + e.what());
    }
    const json params = d.contains("params") ? d.at("params") : json::object();
    const std::string w = "distribution.params";
    auto get = [&](const char* key, std::optional<double> fallback = std::nullopt) {
        if (!params.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(w + ": missing key '" + key + "'");
        }
        return number(params.at(key), w + "." + key);
    };
    std::optional<IncrementSpec> spec;
    try {
        switch (family) {
            case Family::shifted_normal:
                reject_unknown(params, w, {"mean", "variance"});
                spec = IncrementSpec::shifted_normal(get("mean"), get("variance", 1.0));
                break;
            case Family::standardized_exponential:
                reject_unknown(params, w, {"rate", "shift"});
                spec = IncrementSpec::exponential(get("rate", 1.0), get("shift", 0.0));
                break;
            case Family::two_point:
                reject_unknown(params, w, {"low", "high", "p"});
                spec = IncrementSpec::two_point(get("low"), get("high"), get("p"));
                break;
            case Family::custom_discrete:
                reject_unknown(params, w, {"values", "probs"});
                spec = IncrementSpec::discrete(numbers(require(params, w, "values"), w + ".values"),
                                               numbers(require(params, w, "probs"), w + ".probs"));
                break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(w + ": " + e.what());
    }
    bool standardize_it = true;
    if (d.contains("standardize")) {
        if (!d.at("standardize").is_boolean()) throw ConfigError("distribution.standardize: expected a boolean");
        standardize_it = d.at("standardize").get<bool>();
    }
    return standardize_it ? standardize(*spec) : *spec;
}

WalkConfig parse_walk(const json& w) {
    reject_unknown(w, "walk", {"n", "boundary"});
    WalkConfig out;
    out.n = integer(require(w, "walk", "n"), "walk.n");
    if (out.n < 1) throw ConfigError("walk.n: must be at least 1");
    const json& b = require(w, "walk", "boundary");
    reject_unknown(b, "walk.boundary", {"checkpoints", "levels", "targets"});
    out.checkpoints = integers(require(b, "walk.boundary", "checkpoints"), "walk.boundary.checkpoints");
    const bool has_levels = b.contains("levels");
    const bool has_targets = b.contains("targets");
    if (has_levels == has_targets)
        throw ConfigError("walk.boundary: exactly one of 'levels' or 'targets' is required");
    if (has_levels) {
        out.levels = numbers(b.at("levels"), "walk.boundary.levels");
    } else {
        const json& t = b.at("targets");
        reject_unknown(t, "walk.boundary.targets", {"V", "Delta"});
        BoundaryTargets targets;
        if (t.contains("V")) targets.V = optional_numbers(t.at("V"), "walk.boundary.targets.V");
        if (t.contains("Delta")) targets.Delta = optional_numbers(t.at("Delta"), "walk.boundary.targets.Delta");
        out.targets = std::move(targets);
    }
    if (!out.checkpoints.empty() && out.checkpoints.back() != out.n)
        throw ConfigError("walk.boundary.checkpoints: last checkpoint must equal walk.n");
    return out;
}

RunConfig parse_run(const json& r) {
    reject_unknown(r, "run", {"reps", "master_seed", "workers", "tolerances"});
    RunConfig out;
    if (r.contains("reps")) {
        const auto reps = integer(r.at("reps"), "run.reps");
        if (reps < 1) throw ConfigError("run.reps: must be at least 1");
        out.reps = static_cast<std::size_t>(reps);
    }
    if (r.contains("master_seed")) {
        if (!r.at("master_seed").is_number_unsigned() && !r.at("master_seed").is_number_integer())
            throw ConfigError("run.master_seed: expected a non-negative integer");
        if (r.at("master_seed").is_number_integer() && r.at("master_seed").get<std::int64_t>() < 0)
            throw ConfigError("run.master_seed: expected a non-negative integer");
        out.master_seed = r.at("master_seed").get<std::uint64_t>();
    }
    if (r.contains("workers")) {
        const auto workers = integer(r.at("workers"), "run.workers");
        if (workers < 1) throw ConfigError("run.workers: must be at least 1");
        out.workers = static_cast<unsigned>(workers);
    }
    if (r.contains("tolerances")) {
        const json& t = r.at("tolerances");
        reject_unknown(t, "run.tolerances", {"sup_discrepancy", "ks", "mvn"});
        if (t.contains("sup_discrepancy"))
            out.sup_discrepancy = number(t.at("sup_discrepancy"), "run.tolerances.sup_discrepancy");
        if (t.contains("ks")) out.ks = number(t.at("ks"), "run.tolerances.ks");
        if (t.contains("mvn")) {
            out.mvn_tol = number(t.at("mvn"), "run.tolerances.mvn");
            if (!(out.mvn_tol > 0)) throw ConfigError("run.tolerances.mvn: must be positive");
        }
    }
    return out;
}

OutputConfig parse_output(const json& o) {
    reject_unknown(o, "output", {"report", "csv", "samples"});
    OutputConfig out;
    auto path = [&](const char* key) -> std::optional<std::string> {
        if (!o.contains(key)) return std::nullopt;
        if (!o.at(key).is_string()) throw ConfigError(std::string("output.") + key + ": expected a string");
        return o.at(key).get<std::string>();
    };
    out.report = path("report");
    out.csv = path("csv");
    out.samples = path("samples");
    return out;
}

LawConfig parse_law(const json& l, const std::string& where) {
    reject_unknown(l, where, {"kind", "V", "Delta", "alpha", "lambda"});
    LawConfig out;
    const json& kind = require(l, where, "kind");
    if (!kind.is_string()) throw ConfigError(where + ".kind: expected a string");
    out.kind = parse_law_kind(kind.get<std::string>());
    if (l.contains("V")) out.V = extendeds(l.at("V"), where + ".V");
    if (l.contains("Delta")) out.Delta = extendeds(l.at("Delta"), where + ".Delta");
    if (l.contains("alpha")) out.alpha = numbers(l.at("alpha"), where + ".alpha");
    if (l.contains("lambda")) out.lambda = numbers(l.at("lambda"), where + ".lambda");
    return out;
}

}  // namespace

StepBoundary WalkConfig::boundary(double a) const {
    if (levels) return StepBoundary(checkpoints, *levels);
    return design_boundary(*targets, a, checkpoints);
}

ExtendedReal parse_extended(std::string_view text) {
    if (text == "inf" || text == "+inf" || text == "infinity" || text == "Infinity" || text == "+infinity")
        return ExtendedReal::infinity();
    double x = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || !std::isfinite(x))
        throw ConfigError("expected a real number or inf, got '" + std::string(text) + "'");
    return ExtendedReal(x);
}

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = spec.find(':', start);
        const auto piece = spec.substr(start, colon == std::string_view::npos ? spec.npos : colon - start);
        const ExtendedReal v = parse_extended(piece);
        if (v.is_infinite()) throw ConfigError("grid bounds must be finite");
        parts.push_back(v.value());
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3) throw ConfigError("grid must have the form a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0) || b < a) throw ConfigError("grid needs a <= b and step > 0");
    const double count = std::floor((b - a) / step + 1e-9);
    if (count > 1e7) throw ConfigError("grid has too many points");
    std::vector<double> out;
    for (std::int64_t k = 0; k <= static_cast<std::int64_t>(count); ++k) {
        double x = a + static_cast<double>(k) * step;
        if (std::fabs(x) < 1e-12 * step) x = 0.0;
        out.push_back(x);
    }
    return out;
}

LimitProfile profile_from_law(const LawConfig& law) {
    std::vector<ExtendedReal> V = law.V.value_or(std::vector<ExtendedReal>{});
    std::vector<ExtendedReal> Delta = law.Delta.value_or(std::vector<ExtendedReal>{});
    switch (law.kind) {
        case LawKind::wald:
        case LawKind::renewal:
            if (V.empty()) V = {ExtendedReal::infinity()};
            break;
        case LawKind::corollary2:
        case LawKind::corollary3:
            // The infinite Delta regime: every gap diverges.
            if (V.empty()) throw ConfigError("law.V: required for " + std::string(to_string(law.kind)));
            Delta.assign(V.size() - 1, ExtendedReal::infinity());
            break;
        default:
            if (V.empty()) throw ConfigError("law.V: required for " + std::string(to_string(law.kind)));
            break;
    }
    // A trailing infinite V closes the list for the finite part of the law.
    if (V.back().is_finite()) {
        V.push_back(ExtendedReal::infinity());
        if (law.kind == LawKind::corollary2 || law.kind == LawKind::corollary3)
            Delta.push_back(ExtendedReal::infinity());
    }
    if (Delta.size() + 1 < V.size())
        throw ConfigError("law.Delta: need one entry per finite V");
    if (Delta.size() + 1 > V.size()) Delta.resize(V.size() - 1, ExtendedReal(0.0));
    LimitProfile p = LimitProfile::unit_lambda(V, Delta);
    if (law.lambda) {
        if (law.lambda->size() > p.adjacent_lambda.size())
            throw ConfigError("law.lambda: more entries than gaps");
        std::copy(law.lambda->begin(), law.lambda->end(), p.adjacent_lambda.begin());
    }
    if (law.alpha) {
        if (law.alpha->size() > p.alpha.size()) throw ConfigError("law.alpha: more entries than gaps");
        std::copy(law.alpha->begin(), law.alpha->end(), p.alpha.begin());
        if (!law.lambda && (law.kind == LawKind::corollary2 || law.kind == LawKind::theorem2))
            for (std::size_t j = 0; j < law.alpha->size(); ++j) p.adjacent_lambda[j] = (*law.alpha)[j];
    } else if (law.lambda && law.kind == LawKind::theorem2) {
        std::copy(law.lambda->begin(), law.lambda->end(), p.alpha.begin());
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("law: ") + e.what());
    }
    return p;
}

ExperimentConfig parse_config(std::string text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "config", {"distribution", "walk", "run", "output", "joint", "compare", "sweep", "bound"});
    ExperimentConfig cfg;
    cfg.digest = content_digest(text);
    cfg.text = std::move(text);
    if (root.contains("distribution")) cfg.distribution = parse_distribution(root.at("distribution"));
    if (root.contains("walk")) cfg.walk = parse_walk(root.at("walk"));
    if (root.contains("run")) cfg.run = parse_run(root.at("run"));
    if (root.contains("output")) cfg.output = parse_output(root.at("output"));
    if (root.contains("joint")) {
        const json& j = root.at("joint");
        reject_unknown(j, "joint", {"checkpoints", "u_axes"});
        JointConfig joint;
        joint.checkpoints = integers(require(j, "joint", "checkpoints"), "joint.checkpoints");
        joint.u_axes = axes(require(j, "joint", "u_axes"), "joint.u_axes");
        if (joint.u_axes.size() != 1 && joint.u_axes.size() != joint.checkpoints.size())
            throw ConfigError("joint.u_axes: need one shared axis or one axis per checkpoint");
        cfg.joint = std::move(joint);
    }
    if (root.contains("compare")) {
        const json& c = root.at("compare");
        reject_unknown(c, "compare", {"index", "law", "curve_grid"});
        CompareConfig compare;
        if (c.contains("index")) {
            const auto idx = integer(c.at("index"), "compare.index");
            if (idx < 1) throw ConfigError("compare.index: must be at least 1");
            compare.index = static_cast<std::size_t>(idx);
        }
        compare.law = parse_law(require(c, "compare", "law"), "compare.law");
        if (c.contains("curve_grid")) {
            if (!c.at("curve_grid").is_string()) throw ConfigError("compare.curve_grid: expected \"a:b:step\"");
            compare.curve_grid = parse_grid(c.at("curve_grid").get<std::string>());
        } else {
            compare.curve_grid = parse_grid("-4:4:0.05");
        }
        cfg.compare = std::move(compare);
    }
    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        reject_unknown(s, "sweep", {"fractions", "n_values", "u_axes", "slope_range"});
        SweepConfig sweep;
        if (s.contains("fractions")) sweep.fractions = numbers(s.at("fractions"), "sweep.fractions");
        sweep.n_values = integers(require(s, "sweep", "n_values"), "sweep.n_values");
        if (sweep.n_values.size() < 2) throw ConfigError("sweep.n_values: need at least two values");
        sweep.u_axes = axes(require(s, "sweep", "u_axes"), "sweep.u_axes");
        if (s.contains("slope_range")) {
            const auto r = numbers(s.at("slope_range"), "sweep.slope_range");
            if (r.size() != 2 || r[0] > r[1]) throw ConfigError("sweep.slope_range: expected [low, high]");
            sweep.slope_range = std::pair{r[0], r[1]};
        }
        cfg.sweep = std::move(sweep);
    }
    if (root.contains("bound")) {
        const json& b = root.at("bound");
        reject_unknown(b, "bound", {"C0", "C1"});
        if (b.contains("C0")) cfg.bound.C0 = number(b.at("C0"), "bound.C0");
        if (b.contains("C1")) cfg.bound.C1 = number(b.at("C1"), "bound.C1");
    }
    return cfg;
}

}  // namespace fptsim
