#pragma once

#include "sgpt/cutoff.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/field.hpp"
#include "sgpt/interacting.hpp"
#include "sgpt/model.hpp"
#include "sgpt/propagators.hpp"
#include "sgpt/series.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sgpt {

using json = nlohmann::ordered_json;

struct OutputSpec {
    std::string path; // empty: standard output
    std::string format = "csv";

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Everything a run depends on. All randomness derives from spec.seed.
struct RunConfig {
    double a = std::sqrt(2.0 * std::numbers::pi); // beta = 1/2 at hbar = 1
    double hbar = 1.0;
    double lambda = 1.0;
    std::optional<double> p;
    CutoffFunction cutoff = CutoffFunction::bump({0.0, 0.0}, 0.2);
    FieldConfiguration phi;
    IntegrationSpec spec;
    std::optional<double> mass;
    double mu = 1.0;
    std::optional<CurrentObservable> current;
    SmoothStateCorrection state = SmoothStateCorrection::none();
    OutputSpec output;

    ModelParams model() const { return ModelParams(a, hbar, lambda, p); }

    std::optional<MassiveParams> massive() const
    {
        if (!mass) {
            return std::nullopt;
        }
        return MassiveParams{*mass, mu};
    }

    StateModel state_model() const
    {
        StateModel s;
        s.v = state;
        s.mass = massive();
        return s;
    }

    /// Observable of the `current` subcommand; defaults to d_t Phi(g).
    CurrentObservable observable() const { return current.value_or(CurrentObservable{0, cutoff, FieldMode::Current}); }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) {
        throw ConfigError("'" + where + "' must be an object");
    }
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed) {
            ok = ok || item.key() == k;
        }
        if (!ok) {
            throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
        }
    }
}

inline std::string key_path(const std::string& where, const char* key)
{
    return where.empty() ? std::string(key) : where + "." + key;
}

inline double get_number(const json& j, const std::string& where, const char* key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError("'" + key_path(where, key) + "' must be a number");
    }
    return v.get<double>();
}

inline std::uint64_t get_count(const json& j, const std::string& where, const char* key, std::uint64_t fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError("'" + key_path(where, key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::string get_string(const json& j, const std::string& where, const char* key, const std::string& fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_string()) {
        throw ConfigError("'" + key_path(where, key) + "' must be a string");
    }
    return v.get<std::string>();
}

inline SpacetimePoint get_point(const json& j, const std::string& where, const char* key, SpacetimePoint fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError("'" + key_path(where, key) + "' must be a [t, x] pair");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

/// Runs `make`, turning library errors into ConfigError about `where`.
template <class F>
auto guarded(const std::string& where, F&& make)
{
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("'" + where + "': " + e.what());
    }
}

inline CutoffFunction parse_cutoff(const json& j, const std::string& where)
{
    check_keys(j, where, {"kind", "center", "radius", "amplitude"});
    return guarded(where, [&] {
        return CutoffFunction(cutoff_kind_from_string(get_string(j, where, "kind", "bump")),
                              get_point(j, where, "center", {0.0, 0.0}), get_number(j, where, "radius", 0.2),
                              get_number(j, where, "amplitude", 1.0));
    });
}

inline json cutoff_json(const CutoffFunction& g)
{
    return json{{"kind", to_string(g.kind())},
                {"center", {g.center().t, g.center().x}},
                {"radius", g.radius()},
                {"amplitude", g.amplitude()}};
}

inline FieldConfiguration parse_profile(const json& j, const std::string& where)
{
    check_keys(j, where, {"kind", "amplitude", "center", "width", "k"});
    const std::string kind = get_string(j, where, "kind", "zero");
    const double amp = get_number(j, where, "amplitude", 0.0);
    return guarded(where, [&] {
        if (kind == "zero") {
            return FieldConfiguration::zero();
        }
        if (kind == "constant") {
            return FieldConfiguration::constant(amp);
        }
        if (kind == "gaussian") {
            return FieldConfiguration::gaussian(get_point(j, where, "center", {0.0, 0.0}),
                                                get_number(j, where, "width", 1.0), amp);
        }
        if (kind == "plane-wave") {
            const SpacetimePoint k = get_point(j, where, "k", {0.0, 0.0});
            return FieldConfiguration::plane_wave({k.t, k.x}, amp);
        }
        throw ConfigError("'" + key_path(where, "kind") + "': unknown field kind '" + kind + "'");
    });
}

inline FieldConfiguration parse_phi(const json& j)
{
    if (j.is_array()) {
        FieldConfiguration out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            out = out.plus(parse_profile(j[i], "phi[" + std::to_string(i) + "]"));
        }
        return out;
    }
    return parse_profile(j, "phi");
}

inline json profile_json(const FieldConfiguration::Profile& p)
{
    using K = FieldConfiguration::Kind;
    switch (p.kind) {
    case K::Zero: return json{{"kind", "zero"}};
    case K::Constant: return json{{"kind", "constant"}, {"amplitude", p.amplitude}};
    case K::Gaussian:
        return json{{"kind", "gaussian"},
                    {"amplitude", p.amplitude},
                    {"center", {p.center.t, p.center.x}},
                    {"width", p.width}};
    case K::PlaneWave: return json{{"kind", "plane-wave"}, {"amplitude", p.amplitude}, {"k", {p.k[0], p.k[1]}}};
    }
    return json{{"kind", "zero"}};
}

inline json phi_json(const FieldConfiguration& phi)
{
    const auto& ps = phi.profiles();
    if (ps.empty()) {
        return json{{"kind", "zero"}};
    }
    if (ps.size() == 1) {
        return profile_json(ps.front());
    }
    json arr = json::array();
    for (const auto& p : ps) {
        arr.push_back(profile_json(p));
    }
    return arr;
}

inline SmoothStateCorrection parse_state(const json& j)
{
    check_keys(j, "state", {"kind", "strength", "width"});
    const std::string kind = get_string(j, "state", "kind", "none");
    const double c = get_number(j, "state", "strength", 0.0);
    return guarded("state", [&] {
        if (kind == "none") {
            return SmoothStateCorrection::none();
        }
        if (kind == "constant") {
            return SmoothStateCorrection::constant(c);
        }
        if (kind == "gaussian") {
            return SmoothStateCorrection::gaussian(c, get_number(j, "state", "width", 1.0));
        }
        throw ConfigError("'state.kind': unknown state correction '" + kind + "'");
    });
}

inline json state_json(const SmoothStateCorrection& v)
{
    switch (v.kind()) {
    case SmoothStateCorrection::Kind::None: return json{{"kind", "none"}};
    case SmoothStateCorrection::Kind::Constant: return json{{"kind", "constant"}, {"strength", v.strength()}};
    case SmoothStateCorrection::Kind::Gaussian:
        return json{{"kind", "gaussian"}, {"strength", v.strength()}, {"width", v.width()}};
    }
    return json{{"kind", "none"}};
}

} // namespace detail

/// Parses and validates a configuration; unknown keys and invalid values
/// raise ConfigError naming the key.
inline RunConfig parse_config(const json& j)
{
    using namespace detail;
    check_keys(j, "", {"a", "hbar", "lambda", "p", "cutoff", "phi", "spec", "mass", "mu", "current", "state",
                       "output"});
    RunConfig c;
    c.a = get_number(j, "", "a", c.a);
    c.hbar = get_number(j, "", "hbar", c.hbar);
    c.lambda = get_number(j, "", "lambda", c.lambda);
    if (j.contains("p")) {
        c.p = get_number(j, "", "p", 0.0);
    }
    if (j.contains("cutoff")) {
        c.cutoff = parse_cutoff(j.at("cutoff"), "cutoff");
    }
    if (j.contains("phi")) {
        c.phi = parse_phi(j.at("phi"));
    }
    if (j.contains("spec")) {
        const json& s = j.at("spec");
        check_keys(s, "spec", {"method", "samples", "seed", "max_order", "tensor_nodes", "pair_importance"});
        c.spec.method = guarded("spec.method", [&] {
            return integration_method_from_string(get_string(s, "spec", "method", "monte-carlo"));
        });
        c.spec.samples = get_count(s, "spec", "samples", c.spec.samples);
        c.spec.seed = get_count(s, "spec", "seed", c.spec.seed);
        c.spec.max_order = static_cast<int>(get_count(s, "spec", "max_order", c.spec.max_order));
        c.spec.tensor_nodes = static_cast<int>(get_count(s, "spec", "tensor_nodes", 0));
        if (s.contains("pair_importance")) {
            if (!s.at("pair_importance").is_boolean()) {
                throw ConfigError("'spec.pair_importance' must be true or false");
            }
            c.spec.pair_importance = s.at("pair_importance").get<bool>();
        }
    }
    if (j.contains("mass")) {
        c.mass = get_number(j, "", "mass", 0.0);
    }
    c.mu = get_number(j, "", "mu", c.mu);
    if (j.contains("state")) {
        c.state = parse_state(j.at("state"));
    }
    if (j.contains("current")) {
        const json& cj = j.at("current");
        check_keys(cj, "current", {"mu", "f", "field_mode"});
        CurrentObservable obs{0, c.cutoff, FieldMode::Current};
        obs.mu = static_cast<int>(get_count(cj, "current", "mu", 0));
        if (cj.contains("f")) {
            obs.f = parse_cutoff(cj.at("f"), "current.f");
        }
        obs.field_mode = guarded("current.field_mode", [&] {
            return field_mode_from_string(get_string(cj, "current", "field_mode", "current"));
        });
        guarded("current.mu", [&] {
            obs.validate();
            return 0;
        });
        c.current = obs;
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"path", "format"});
        c.output.path = get_string(o, "output", "path", "");
        c.output.format = get_string(o, "output", "format", "csv");
        if (c.output.format != "csv" && c.output.format != "json") {
            throw ConfigError("'output.format' must be csv or json");
        }
    }

    // model: beta < 1 and beta p < 1 are checked by ModelParams
    guarded(j.contains("p") ? "p" : "a", [&] { return c.model(); });
    guarded("spec", [&] {
        c.spec.validate(1);
        return 0;
    });
    if (c.mass) {
        guarded("mass", [&] {
            c.massive()->validate();
            return 0;
        });
        if (c.current && c.current->field_mode == FieldMode::Field) {
            throw ConfigError("'current.field_mode': the field Phi(f) is only available without a mass "
                              "(Hadamard-state runs)");
        }
        if (!c.state.is_none()) {
            throw ConfigError("'state': a state correction cannot be combined with a mass");
        }
    } else if (!(c.mu > 0.0)) {
        throw ConfigError("'mu' must be > 0");
    }
    return c;
}

inline RunConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Full echo of a configuration; parse_config(to_json(c)) == c.
inline json to_json(const RunConfig& c)
{
    using namespace detail;
    json j;
    j["a"] = c.a;
    j["hbar"] = c.hbar;
    j["lambda"] = c.lambda;
    if (c.p) {
        j["p"] = *c.p;
    }
    j["cutoff"] = cutoff_json(c.cutoff);
    j["phi"] = phi_json(c.phi);
    j["spec"] = json{{"method", to_string(c.spec.method)},
                     {"samples", c.spec.samples},
                     {"seed", c.spec.seed},
                     {"max_order", c.spec.max_order},
                     {"tensor_nodes", c.spec.tensor_nodes},
                     {"pair_importance", c.spec.pair_importance}};
    if (c.mass) {
        j["mass"] = *c.mass;
    }
    j["mu"] = c.mu;
    if (c.current) {
        j["current"] = json{{"mu", c.current->mu},
                            {"f", cutoff_json(c.current->f)},
                            {"field_mode", to_string(c.current->field_mode)}};
    }
    j["state"] = state_json(c.state);
    j["output"] = json{{"path", c.output.path}, {"format", c.output.format}};
    return j;
}

} // namespace sgpt
