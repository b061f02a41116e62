// Command line front end: propagator | kernel | smatrix | current | verify | limits

#include "sgpt/sgpt.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sgpt;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Overrides {
    std::string config;
    std::optional<int> order;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<double> radius;
    std::optional<double> mass;
    std::optional<int> threads;
    std::string output;
    std::string format;
    bool timing = false;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--order", o.order, "highest perturbative order");
    sub->add_option("--samples", o.samples, "integration samples per sector");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--beta", o.beta, "set a from beta = hbar a^2 / 4pi");
    sub->add_option("--radius", o.radius, "support radius of the cutoff g");
    sub->add_option("--mass", o.mass, "auxiliary mass m");
    sub->add_option("--threads", o.threads, "worker threads (default: SG_THREADS or all cores)");
    sub->add_option("--output", o.output, "output file (default: standard output)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--timing", o.timing, "add wall time to JSON reports");
}

RunConfig resolve(const Overrides& o)
{
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    json j = to_json(c);
    if (o.order) {
        j["spec"]["max_order"] = *o.order;
    }
    if (o.samples) {
        j["spec"]["samples"] = *o.samples;
    }
    if (o.seed) {
        j["spec"]["seed"] = *o.seed;
    }
    if (o.beta) {
        if (!(*o.beta > 0.0)) {
            throw ConfigError("'beta' must be > 0");
        }
        j["a"] = std::sqrt(4.0 * std::numbers::pi * *o.beta / c.hbar);
    }
    if (o.radius) {
        j["cutoff"]["radius"] = *o.radius;
    }
    if (o.mass) {
        j["mass"] = *o.mass;
    }
    if (!o.output.empty()) {
        j["output"]["path"] = o.output;
    }
    if (!o.format.empty()) {
        j["output"]["format"] = o.format;
    }
    RunConfig out = parse_config(j);
    if (o.threads) {
        out.spec.threads = *o.threads;
    } else if (const char* env = std::getenv("SG_THREADS")) {
        try {
            out.spec.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("SG_THREADS must be an integer");
        }
    }
    if (out.spec.threads < 0) {
        throw ConfigError("'threads' must be >= 0");
    }
    return out;
}

void emit(const RunConfig& c, const std::string& text)
{
    if (c.output.path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output.path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write output file '" + c.output.path + "'");
    }
    out << text;
}

json report_head(const RunConfig& c, const char* command)
{
    json j;
    j["command"] = command;
    j["version"] = std::string("sgpt ") + version;
    j["config"] = to_json(c);
    return j;
}

std::string dump(json j) { return j.dump(2) + "\n"; }

/// "a,-a,+a" (or numbers in units of a) -> charges
std::vector<double> parse_charges(const std::string& text, double a)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "a" || tok == "+a") {
            out.push_back(a);
        } else if (tok == "-a") {
            out.push_back(-a);
        } else {
            throw ConfigError("'charges': expected a, +a or -a, got '" + tok + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError("'charges' must not be empty");
    }
    return out;
}

/// "t:x;t:x;..."
std::vector<SpacetimePoint> parse_points(const std::string& text)
{
    std::vector<SpacetimePoint> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("'points': expected t:x, got '" + tok + "'");
        }
        try {
            out.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError("'points': cannot read '" + tok + "'");
        }
    }
    return out;
}

/// Deterministic points in the support of g drawn from the seed.
std::vector<SpacetimePoint> seeded_points(const RunConfig& c, std::size_t n)
{
    std::vector<SpacetimePoint> pts;
    std::uint64_t idx = 0;
    while (pts.size() < n) {
        SampleStream rng(c.spec.seed, 0x200, idx++);
        const SpacetimePoint p{c.cutoff.t_min() + 2.0 * c.cutoff.radius() * rng.uniform(),
                               c.cutoff.x_min() + 2.0 * c.cutoff.radius() * rng.uniform()};
        bool ok = true;
        for (const auto& q : pts) {
            const SpacetimePoint d = p - q;
            ok = ok && std::min(std::abs(d.u()), std::abs(d.v())) > 1e-3;
        }
        if (ok) {
            pts.push_back(p);
        }
    }
    return pts;
}

int cmd_propagator(const RunConfig& c, const std::string& kind_name, int grid, double extent)
{
    std::vector<PropagatorKind> kinds;
    if (kind_name == "all") {
        for (auto k : {PropagatorKind::Retarded, PropagatorKind::Advanced, PropagatorKind::Causal,
                       PropagatorKind::Dirac, PropagatorKind::HadamardH, PropagatorKind::TwoPointW,
                       PropagatorKind::Feynman, PropagatorKind::AntiFeynman}) {
            kinds.push_back(k);
        }
    } else {
        kinds.push_back(detail::guarded("kind", [&] { return propagator_kind_from_string(kind_name); }));
    }
    if (grid < 1) {
        throw ConfigError("'grid' must be >= 1");
    }
    const auto mp = c.massive();
    std::ostringstream csv;
    json rows = json::array();
    csv << "kind,t,x,re,im\n";
    for (auto k : kinds) {
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                // cell centres, shifted so that no node is on the cone
                const double t = -extent + (2.0 * i + 1.0) * extent / grid;
                const double x = -extent + (2.0 * j + 1.0) * extent / grid + 0.5 * extent / grid / M_SQRT2;
                const SpacetimePoint p{t, x};
                if (p.on_cone()) {
                    continue;
                }
                complex v;
                if (mp && mp->m > 0.0 && k == PropagatorKind::Feynman) {
                    v = massive_feynman(*mp, p);
                } else if (mp && mp->m > 0.0 && k == PropagatorKind::TwoPointW) {
                    v = massive_two_point(*mp, p);
                } else {
                    v = eval(k, p);
                }
                csv << to_string(k) << ',' << num(t) << ',' << num(x) << ',' << num(v.real()) << ','
                    << num(v.imag()) << '\n';
                rows.push_back({{"kind", to_string(k)}, {"t", t}, {"x", x}, {"re", v.real()}, {"im", v.imag()}});
            }
        }
    }
    if (c.output.format == "json") {
        json j = report_head(c, "propagator");
        j["values"] = rows;
        emit(c, dump(j));
    } else {
        emit(c, csv.str());
    }
    return exit_ok;
}

int cmd_kernel(const RunConfig& c, const std::string& charges_text, const std::string& points_text)
{
    const ModelParams params = c.model();
    const ChargeList q(params.a(), parse_charges(charges_text, params.a()));
    const std::vector<SpacetimePoint> pts =
        points_text.empty() ? seeded_points(c, q.size()) : parse_points(points_text);
    if (pts.size() != q.size()) {
        throw ConfigError("'points': " + std::to_string(pts.size()) + " points for " + std::to_string(q.size()) +
                          " charges");
    }
    const auto mp = c.massive();
    const complex v = mp && mp->m > 0.0 ? massive_tn_kernel(q, pts, c.phi, params, *mp)
                                        : tn_kernel(q, pts, c.phi, params, c.state);
    json rec;
    rec["charges"] = q.values();
    json pj = json::array();
    for (const auto& p : pts) {
        pj.push_back({p.t, p.x});
    }
    rec["points"] = pj;
    rec["value_re"] = v.real();
    rec["value_im"] = v.imag();
    if (c.output.format == "csv") {
        emit(c, "value_re,value_im\n" + num(v.real()) + "," + num(v.imag()) + "\n");
    } else {
        emit(c, dump(rec));
    }
    return exit_ok;
}

int cmd_smatrix(const RunConfig& c, bool vacuum, bool sectors, bool timing)
{
    const auto start = std::chrono::steady_clock::now();
    const ModelParams params = c.model();
    const int N = c.spec.max_order;
    const ConvergenceReport rep = vacuum ? vacuum_limit_series(N, c.cutoff, c.phi, params, c.spec, c.massive())
                                         : partial_sums(N, c.cutoff, c.phi, params, c.spec, c.massive());
    if (c.output.format == "csv") {
        std::ostringstream csv;
        csv << "n,k,re,im,abs,stderr,bound,partial_sum_re,partial_sum_im\n";
        for (std::size_t i = 0; i < rep.orders.size(); ++i) {
            const OrderResult& o = rep.orders[i];
            const complex ps = rep.partial_sums[i];
            csv << o.n << ",all," << num(o.total.real()) << ',' << num(o.total.imag()) << ','
                << num(std::abs(o.total)) << ',' << num(o.stderr) << ',' << num(o.bound) << ',' << num(ps.real())
                << ',' << num(ps.imag()) << '\n';
            if (sectors) {
                for (const auto& s : o.k_breakdown) {
                    csv << o.n << ',' << s.k << ',' << num(s.value.real()) << ',' << num(s.value.imag()) << ','
                        << num(std::abs(s.value)) << ',' << num(s.stderr) << ",,,\n";
                }
            }
        }
        emit(c, csv.str());
        return exit_ok;
    }
    json j = report_head(c, vacuum ? "smatrix --vacuum-limit" : "smatrix");
    json orders = json::array();
    for (std::size_t i = 0; i < rep.orders.size(); ++i) {
        const OrderResult& o = rep.orders[i];
        json oj{{"n", o.n},
                {"re", o.total.real()},
                {"im", o.total.imag()},
                {"abs", std::abs(o.total)},
                {"stderr", o.stderr},
                {"bound", o.bound},
                {"partial_sum_re", rep.partial_sums[i].real()},
                {"partial_sum_im", rep.partial_sums[i].imag()},
                {"increment", rep.increments[i]}};
        json sj = json::array();
        for (const auto& s : o.k_breakdown) {
            sj.push_back({{"k", s.k}, {"re", s.value.real()}, {"im", s.value.imag()}, {"stderr", s.stderr}});
        }
        oj["sectors"] = sj;
        orders.push_back(oj);
    }
    j["orders"] = orders;
    j["checks"] = {{"increments_decreasing", rep.increments_decreasing},
                   {"bound_ratio_test", rep.bound_ratio.passed},
                   {"bound_ratio_n0", rep.bound_ratio.n0},
                   {"bound_ratio_last", rep.bound_ratio.last_ratio}};
    if (timing) {
        j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(c, dump(j));
    return exit_ok;
}

int cmd_current(const RunConfig& c, bool timing)
{
    const auto start = std::chrono::steady_clock::now();
    const ModelParams params = c.model();
    const CurrentReport rep =
        current_series(c.spec.max_order, c.cutoff, c.observable(), c.phi, params, c.spec, c.state_model());
    if (c.output.format == "csv") {
        std::ostringstream csv;
        csv << "n,j_re,j_im,m_re,m_im,total_re,total_im,stderr,bound\n";
        for (std::size_t i = 0; i < rep.retarded.size(); ++i) {
            const RetardedOrder& r = rep.retarded[i];
            csv << r.n << ',' << num(r.j_part.real()) << ',' << num(r.j_part.imag()) << ',' << num(r.m_part.real())
                << ',' << num(r.m_part.imag()) << ',' << num(r.total.real()) << ',' << num(r.total.imag()) << ','
                << num(r.stderr) << ',' << num(rep.orders[i].bound) << '\n';
        }
        emit(c, csv.str());
        return exit_ok;
    }
    json j = report_head(c, "current");
    json orders = json::array();
    for (std::size_t i = 0; i < rep.retarded.size(); ++i) {
        const RetardedOrder& r = rep.retarded[i];
        orders.push_back({{"n", r.n},
                          {"j_re", r.j_part.real()},
                          {"j_im", r.j_part.imag()},
                          {"m_re", r.m_part.real()},
                          {"m_im", r.m_part.imag()},
                          {"total_re", r.total.real()},
                          {"total_im", r.total.imag()},
                          {"stderr", r.stderr},
                          {"bound", rep.orders[i].bound},
                          {"partial_sum_re", rep.partial_sums[i].real()},
                          {"partial_sum_im", rep.partial_sums[i].imag()}});
    }
    j["orders"] = orders;
    j["checks"] = {{"increments_decreasing", rep.increments_decreasing}};
    if (timing) {
        j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(c, dump(j));
    return exit_ok;
}

int cmd_verify(const RunConfig& c, bool timing)
{
    const auto start = std::chrono::steady_clock::now();
    const std::vector<SuiteResult> suites = run_all_suites(c.spec.seed);
    // the echoed configuration must re-parse to itself
    SuiteResult echo{"config_round_trip", true, 0.0, 0.0, 1, ""};
    RunConfig again = parse_config(to_json(c));
    again.spec.threads = c.spec.threads;
    echo.passed = again == c;
    bool all = echo.passed;
    json list = json::array();
    for (const auto& s : suites) {
        all = all && s.passed;
        list.push_back({{"name", s.name},
                        {"passed", s.passed},
                        {"worst_error", s.worst},
                        {"tolerance", s.tolerance},
                        {"cases", s.cases},
                        {"note", s.note}});
    }
    list.push_back({{"name", echo.name}, {"passed", echo.passed}, {"worst_error", 0.0}, {"tolerance", 0.0},
                    {"cases", 1}, {"note", ""}});
    json j = report_head(c, "verify");
    j["suites"] = list;
    j["passed"] = all;
    if (timing) {
        j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(c, dump(j));
    return all ? exit_ok : exit_failure;
}

int cmd_limits(const RunConfig& c, const std::string& charges_text, const std::string& scan, int steps)
{
    const ModelParams params = c.model();
    const ChargeList q(params.a(), parse_charges(charges_text, params.a()));
    const auto colon = scan.find(':');
    double lo = 1e-4;
    double hi = 1e-2;
    if (colon != std::string::npos) {
        try {
            lo = std::stod(scan.substr(0, colon));
            hi = std::stod(scan.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("'mass-scan': expected lo:hi");
        }
    } else if (!scan.empty()) {
        throw ConfigError("'mass-scan': expected lo:hi");
    }
    if (!(lo > 0.0) || !(hi > lo)) {
        throw ConfigError("'mass-scan': need 0 < lo < hi");
    }
    const std::vector<SpacetimePoint> pts = seeded_points(c, q.size());
    const double slope = mass_scan_slope(q, pts, c.phi, params, lo, hi, steps, c.mu);
    const double expected = neutrality_exponent(q, params.hbar());
    const double rel = expected > 0.0 ? std::abs(slope - expected) / expected : std::abs(slope);
    if (c.output.format == "csv") {
        emit(c, "charges,slope,neutrality_exponent,rel_error\n\"" + charges_text + "\"," + num(slope) + ',' +
                    num(expected) + ',' + num(rel) + '\n');
    } else {
        json j = report_head(c, "limits");
        j["charges"] = q.values();
        j["mass_scan"] = {lo, hi};
        j["slope"] = slope;
        j["neutrality_exponent"] = expected;
        j["rel_error"] = rel;
        emit(c, dump(j));
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sine-Gordon perturbation theory: kernels, bounds and Monte Carlo series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("sgpt ") + sgpt::version);

    Overrides o;
    std::string kind = "all";
    int grid = 8;
    double extent = 2.0;
    std::string charges = "a,-a";
    std::string points;
    std::string scan = "1e-4:1e-2";
    int steps = 9;
    bool vacuum = false;
    bool sectors = false;

    auto* prop = app.add_subcommand("propagator", "tabulate propagators on a grid");
    add_common(prop, o);
    prop->add_option("--kind", kind, "propagator kind or 'all'");
    prop->add_option("--grid", grid, "grid points per axis");
    prop->add_option("--extent", extent, "half width of the grid");

    auto* kern = app.add_subcommand("kernel", "time-ordered product kernel at given points");
    add_common(kern, o);
    kern->add_option("--charges", charges, "comma separated charges: a, -a");
    kern->add_option("--points", points, "points t:x;t:x;... (default: drawn from the seed)");

    auto* smat = app.add_subcommand("smatrix", "S-matrix partial sums");
    add_common(smat, o);
    smat->add_flag("--vacuum-limit", vacuum, "neutral sectors only (m -> 0 limit)");
    smat->add_flag("--sectors", sectors, "also list every charge sector");

    auto* cur = app.add_subcommand("current", "interacting current series");
    add_common(cur, o);

    auto* ver = app.add_subcommand("verify", "run the identity suites");
    add_common(ver, o);

    auto* lim = app.add_subcommand("limits", "mass scan and selection-rule slope");
    add_common(lim, o);
    lim->add_option("--charges", charges, "comma separated charges: a, -a");
    lim->add_option("--mass-scan", scan, "mass range lo:hi");
    lim->add_option("--steps", steps, "masses in the scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        const RunConfig c = resolve(o);
        if (*prop) {
            return cmd_propagator(c, kind, grid, extent);
        }
        if (*kern) {
            return cmd_kernel(c, charges, points);
        }
        if (*smat) {
            return cmd_smatrix(c, vacuum, sectors, o.timing);
        }
        if (*cur) {
            return cmd_current(c, o.timing);
        }
        if (*ver) {
            return cmd_verify(c, o.timing);
        }
        if (*lim) {
            return cmd_limits(c, charges, scan, steps);
        }
    } catch (const sgpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const sgpt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}
