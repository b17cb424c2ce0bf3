#include "pmclab/cli_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "pmclab/core_formulas.hpp"

namespace pmclab::cli {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "b",       "c3",       "branch",     "alpha0",   "u-span", "h",      "delta",  "v-count",
        "v-step",  "rho-scale", "out",       "format",   "window", "im-sign", "alpha-side",
        "c3-min",  "c3-max",   "steps",      "samples",  "h-list",
    };
    return keys;
}

double parse_real(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x)) {
        throw UsageError("'" + key + "' needs a finite number, got '" + text + "'");
    }
    return x;
}

int parse_int(const std::string& key, const std::string& text) {
    const double x = parse_real(key, text);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw UsageError("'" + key + "' needs an integer");
    return static_cast<int>(x);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    return out;
}

template <typename T>
const std::string* find(const std::map<std::string, T>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

OutputFormat parse_format(const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "csv") return OutputFormat::CSV;
    if (t == "json") return OutputFormat::JSON;
    throw UsageError("format must be csv or json, got '" + text + "'");
}

void emit(const std::string& path, std::ostream& out, const std::string& payload) {
    if (path.empty() || path == "-") {
        out << payload;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << payload;
}

ordered_json json_number(double x) {
    // JSON has no inf/nan; null marks a residual that could not be evaluated.
    if (!std::isfinite(x)) return nullptr;
    return x;
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw UsageError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        }
    }
    return out;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig config_from_settings(const std::map<std::string, std::string>& settings, OutputFormat default_format) {
    for (const auto& [key, value] : settings) {
        if (key.rfind("tol.", 0) == 0) continue;
        if (!known_keys().count(key)) throw UsageError("unknown setting '" + key + "'");
    }

    RunConfig cfg;
    cfg.format = default_format;
    double b = 1.0;
    double c3 = 0.5;
    std::optional<Branch> branch;
    ImSign sign = ImSign::Plus;
    AlphaSide side = AlphaSide::AcuteSide;

    if (auto v = find(settings, "b")) b = parse_real("b", *v);
    if (!(b > 0.0)) throw UsageError("b must be positive");
    if (auto v = find(settings, "c3")) c3 = parse_real("c3", *v);
    if (auto v = find(settings, "branch")) {
        branch = parse_branch(trim(*v));
        if (!branch) throw UsageError("branch must be LowPos, HighPos or Neg");
    }
    if (auto v = find(settings, "im-sign")) {
        auto s = parse_im_sign(trim(*v));
        if (!s) throw UsageError("im-sign must be plus or minus");
        sign = *s;
    }
    if (auto v = find(settings, "alpha-side")) {
        auto s = parse_alpha_side(trim(*v));
        if (!s) throw UsageError("alpha-side must be acute or obtuse");
        side = *s;
    }

    auto& st = cfg.setup;
    if (auto v = find(settings, "alpha0")) st.alpha0 = parse_real("alpha0", *v);
    if (auto v = find(settings, "u-span")) st.u_span = parse_real("u-span", *v);
    if (auto v = find(settings, "h")) st.h = parse_real("h", *v);
    if (auto v = find(settings, "delta")) st.integrator.delta = parse_real("delta", *v);
    if (auto v = find(settings, "v-count")) st.v_count = parse_int("v-count", *v);
    if (auto v = find(settings, "v-step")) st.v_step = parse_real("v-step", *v);
    if (auto v = find(settings, "window")) st.suite.window = parse_real("window", *v);
    if (auto v = find(settings, "rho-scale")) cfg.rho_scale = parse_real("rho-scale", *v);
    if (auto v = find(settings, "out")) cfg.out = trim(*v);
    if (auto v = find(settings, "format")) cfg.format = parse_format(*v);

    if (!(st.u_span >= 0.0)) throw UsageError("u-span must be nonnegative");
    if (!(st.h > 0.0)) throw UsageError("h must be positive");
    if (!(st.integrator.delta >= 0.0)) throw UsageError("delta must be nonnegative");
    if (st.v_count < 1) throw UsageError("v-count must be at least 1");
    if (find(settings, "v-step") && !(st.v_step > 0.0)) throw UsageError("v-step must be positive");
    if (!(st.suite.window >= 0.0 && st.suite.window < 0.5)) throw UsageError("window must lie in [0, 0.5)");

    for (const auto& [key, value] : settings) {
        if (key.rfind("tol.", 0) != 0) continue;
        const std::string name = key.substr(4);
        const auto& names = verify::residual_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw UsageError("unknown residual '" + name + "'");
        }
        const double tol = parse_real(key, value);
        if (!(tol >= 0.0)) throw UsageError(key + " must be nonnegative");
        st.suite.tolerances.set(name, tol);
    }

    // Domain checks (degenerate c3, branch mismatch) surface as PmcError.
    cfg.params = ModelParams::family(b, c3, branch, sign, side);
    return cfg;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_grid_csv(const family::SurfaceGrid& grid, std::ostream& os) {
    os << kGridCsvHeader << '\n';
    for (const auto& c : grid.cells) {
        const double vals[] = {c.u,
                               c.v,
                               c.alpha,
                               c.a.real(),
                               c.a.imag(),
                               c.mu.real(),
                               c.mu.imag(),
                               c.c.real(),
                               c.c.imag(),
                               c.g,
                               c.K_closed,
                               c.K_gauss,
                               c.hopf.phi1_coeff.real(),
                               c.hopf.phi1_coeff.imag(),
                               c.hopf.phi2_coeff.real(),
                               c.hopf.phi2_coeff.imag(),
                               c.hopf.gamma.real(),
                               c.hopf.gamma.imag()};
        bool first = true;
        for (double x : vals) {
            if (!first) os << ',';
            os << format_double(x);
            first = false;
        }
        os << '\n';
    }
}

ordered_json params_to_json(const ModelParams& p) {
    ordered_json j;
    j["b"] = p.b;
    j["c3"] = p.c3;
    j["rho"] = p.rho;
    j["branch"] = std::string(to_string(p.branch));
    j["im_sign"] = std::string(to_string(p.im_sign));
    j["alpha_side"] = std::string(to_string(p.alpha_side));
    return j;
}

ordered_json grid_to_json(const family::SurfaceGrid& grid) {
    const auto& prof = grid.profile;
    ordered_json j;
    j["params"] = params_to_json(prof.params);
    ordered_json g;
    g["u_count"] = grid.u_count();
    g["v_count"] = grid.v_count();
    g["h"] = prof.h;
    g["v_step"] = grid.v_count() >= 2 ? grid.v_nodes[1] - grid.v_nodes[0] : 0.0;
    g["delta"] = prof.delta;
    g["stop_reason"] = std::string(family::to_string(prof.stop_reason));
    g["invalid_nodes"] = grid.invalid_u.size();
    j["grid"] = g;
    ordered_json cells = ordered_json::array();
    for (const auto& c : grid.cells) {
        ordered_json row;
        row["u"] = c.u;
        row["v"] = c.v;
        row["alpha"] = c.alpha;
        row["a"] = {json_number(c.a.real()), json_number(c.a.imag())};
        row["mu"] = {json_number(c.mu.real()), json_number(c.mu.imag())};
        row["c"] = {json_number(c.c.real()), json_number(c.c.imag())};
        row["g"] = c.g;
        row["K_closed"] = c.K_closed;
        row["K_gauss"] = c.K_gauss;
        row["phi1"] = {json_number(c.hopf.phi1_coeff.real()), json_number(c.hopf.phi1_coeff.imag())};
        row["phi2"] = {json_number(c.hopf.phi2_coeff.real()), json_number(c.hopf.phi2_coeff.imag())};
        row["gamma"] = {json_number(c.hopf.gamma.real()), json_number(c.hopf.gamma.imag())};
        cells.push_back(std::move(row));
    }
    j["cells"] = std::move(cells);
    return j;
}

ordered_json report_to_json(const verify::ResidualReport& report) {
    const auto& pv = report.provenance;
    ordered_json j;
    j["params"] = params_to_json(pv.params);
    ordered_json g;
    g["u_count"] = pv.u_count;
    g["v_count"] = pv.v_count;
    g["window_count"] = pv.window_count;
    g["h"] = pv.h;
    g["v_step"] = pv.v_step;
    g["delta"] = pv.delta;
    g["window"] = pv.window;
    g["u_min"] = pv.u_min;
    g["u_max"] = pv.u_max;
    g["stop_reason"] = std::string(family::to_string(pv.stop_reason));
    g["invalid_nodes"] = pv.invalid_nodes;
    j["grid"] = g;
    ordered_json rs = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json r;
        r["name"] = e.name;
        r["max_abs"] = json_number(e.max_abs);
        r["tolerance"] = e.tolerance;
        r["order"] = e.order ? json_number(*e.order) : ordered_json(nullptr);
        r["pass"] = e.pass;
        r["kind"] = std::string(verify::to_string(e.kind));
        r["applicable"] = e.applicable;
        r["identity"] = e.identity;
        if (!e.note.empty()) r["note"] = e.note;
        rs.push_back(std::move(r));
    }
    j["residuals"] = std::move(rs);
    j["verdict"] = report.verdict ? "pass" : "fail";
    return j;
}

void write_report_csv(const verify::ResidualReport& report, std::ostream& os) {
    os << "name,kind,max_abs,tolerance,order,pass\n";
    for (const auto& e : report.entries) {
        os << e.name << ',' << verify::to_string(e.kind) << ',' << format_double(e.max_abs) << ','
           << format_double(e.tolerance) << ',' << (e.order ? format_double(*e.order) : "") << ','
           << (e.pass ? "true" : "false") << '\n';
    }
}

std::vector<SweepRow> sweep(const SweepOptions& o) {
    if (!(o.b > 0.0) || !(o.c3_min <= o.c3_max) || o.steps < 1 || o.samples < 1) {
        throw PmcError(ErrorKind::InvalidArgument, "sweep needs b > 0, c3_min <= c3_max, steps >= 1, samples >= 1");
    }
    auto touches = [&](double x) { return o.c3_min <= x && x <= o.c3_max; };
    if (touches(0.0) || touches(kEightNinths) || is_degenerate_c3(o.c3_min) || is_degenerate_c3(o.c3_max)) {
        throw PmcError(ErrorKind::DegenerateConstant, "c3 range must avoid 0 and 8/9");
    }

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(o.steps) * static_cast<std::size_t>(o.samples));
    const double b2 = o.b * o.b;
    for (int k = 0; k < o.steps; ++k) {
        const double c3 =
            o.steps == 1 ? o.c3_min : o.c3_min + (o.c3_max - o.c3_min) * static_cast<double>(k) / (o.steps - 1);
        const ModelParams p = ModelParams::family(o.b, c3);
        const SinSqInterval iv = core::branch_interval(p);
        const double det = 8.0 - 9.0 * c3;
        const double k_sup = std::max(core::gauss_curvature_closed_s(iv.lo, o.b, c3),
                                      core::gauss_curvature_closed_s(iv.hi, o.b, c3));
        const double k_limit = core::gauss_curvature_closed_s(kEightNinths, o.b, c3);
        const int denom = iv.hi_closed ? o.samples : o.samples + 1;
        for (int i = 0; i < o.samples; ++i) {
            const double s = iv.lo + iv.width() * static_cast<double>(i + 1) / denom;
            SweepRow r;
            r.c3 = c3;
            r.branch = p.branch;
            r.sin2alpha = s;
            r.alpha = core::alpha_from_sin_sq(s, AlphaSide::AcuteSide);
            const core::cplx a = core::a_of_alpha(r.alpha, p, 0.0);
            r.K_closed = core::gauss_curvature_closed_s(s, o.b, c3);
            r.K_gauss = core::gauss_curvature_from_a(r.alpha, a, o.b, p.rho);
            r.K_sup = k_sup;
            r.K_limit_8_9 = k_limit;
            r.ricci_radicand = core::ricci_radicand(r.alpha, a, p.rho);
            r.gamma_sq_defect = core::gamma_sq_signed(r.alpha, a, o.b, p.rho) - 2.0 * det;
            if (det > 0.0) r.bound_ok = r.K_closed <= -2.0 * b2 + kSweepBoundTol * b2;
            r.gamma_ok = std::abs(r.gamma_sq_defect) <= kSweepGammaTol;
            rows.push_back(r);
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.c3) << ',' << to_string(r.branch) << ',' << format_double(r.sin2alpha) << ','
           << format_double(r.alpha) << ',' << format_double(r.K_closed) << ',' << format_double(r.K_gauss) << ','
           << format_double(r.K_sup) << ',' << format_double(r.K_limit_8_9) << ','
           << format_double(r.ricci_radicand) << ',' << format_double(r.gamma_sq_defect) << ','
           << (r.bound_ok ? (*r.bound_ok ? "true" : "false") : "na") << ',' << (r.gamma_ok ? "true" : "false")
           << '\n';
    }
}

void write_convergence_csv(const verify::ConvergenceTable& table, std::ostream& os) {
    os << "name,kind,h,value,order\n";
    for (const auto& row : table.rows) {
        // Residual orders pair consecutive steps; terminal-alpha orders need
        // two differences, hence one more step of lag.
        const std::size_t lag = row.values.size() - row.orders.size();
        for (std::size_t k = 0; k < row.values.size(); ++k) {
            os << row.name << ',' << verify::to_string(row.kind) << ',' << format_double(table.h_list[k]) << ','
               << format_double(row.values[k]) << ',';
            if (!row.orders.empty() && k >= lag) os << format_double(row.orders[k - lag]);
            os << '\n';
        }
    }
}

std::string describe_interval(const SinSqInterval& iv) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "sin²α ∈ (%g, %g%s", iv.lo, iv.hi, iv.hi_closed ? "]" : ")");
    return buf;
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InadmissibleStart:
    case ErrorKind::NonFiniteState: return kExitIntegration;
    default: return kExitDomain;
    }
}

namespace {

struct Invocation {
    std::map<std::string, std::string> given;
    std::string config_path;
};

void add_option(CLI::App* cmd, Invocation& inv, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        "--" + key, [&inv, key](const std::string& v) { inv.given[key] = v; }, help);
}

void add_run_options(CLI::App* cmd, Invocation& inv) {
    add_option(cmd, inv, "b", "mean curvature parameter, |H| = 2b");
    add_option(cmd, inv, "c3", "integration constant of the family");
    add_option(cmd, inv, "branch", "LowPos, HighPos or Neg (must match c3)");
    add_option(cmd, inv, "alpha0", "starting Kaehler angle (default: interval midpoint)");
    add_option(cmd, inv, "u-span", "integrate over [-u_span, u_span]");
    add_option(cmd, inv, "h", "u step");
    add_option(cmd, inv, "delta", "endpoint guard in sin^2(alpha)");
    add_option(cmd, inv, "v-count", "number of v nodes");
    add_option(cmd, inv, "v-step", "v spacing (default h)");
    add_option(cmd, inv, "im-sign", "sign of Im a: plus or minus");
    add_option(cmd, inv, "alpha-side", "acute or obtuse");
    add_option(cmd, inv, "window", "fraction of the interval trimmed at singular ends");
    add_option(cmd, inv, "out", "output file (default stdout)");
    add_option(cmd, inv, "format", "csv or json");
    cmd->add_option("--config", inv.config_path, "flat key = value config file (default $PMCLAB_CONFIG)");
}

std::map<std::string, std::string> merged_settings(const Invocation& inv,
                                                   const std::map<std::string, std::string>& tols) {
    std::map<std::string, std::string> settings;
    std::string path = inv.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("PMCLAB_CONFIG")) path = env;
    }
    if (!path.empty()) settings = load_config_file(path);
    for (const auto& [k, v] : inv.given) settings[k] = v;
    for (const auto& [k, v] : tols) settings[k] = v;
    return settings;
}

/// Pulls --tol.<name> VALUE and --tol.<name>=VALUE out of the argument list,
/// since CLI11 has no pattern options.
std::vector<std::string> extract_tolerances(const std::vector<std::string>& args,
                                            std::map<std::string, std::string>& tols) {
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--tol.", 0) != 0) {
            rest.push_back(a);
            continue;
        }
        std::string key = a.substr(2);
        std::string value;
        if (auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.erase(eq);
        } else {
            if (i + 1 >= args.size()) throw UsageError(a + " needs a value");
            value = args[++i];
        }
        tols[key] = value;
    }
    return rest;
}

void print_summary(const verify::ResidualReport& report, std::ostream& os) {
    for (const auto& e : report.entries) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-18s %-4s max %.3e  tol %.3e", e.name.c_str(), e.pass ? "ok" : "FAIL",
                      e.max_abs, e.tolerance);
        os << buf;
        if (e.order) os << "  order " << format_double(*e.order).substr(0, 5);
        if (!e.note.empty()) os << "  (" << e.note << ")";
        os << '\n';
    }
    os << "verdict: " << (report.verdict ? "pass" : "fail") << '\n';
}

verify::ResidualReport run_verification(const RunConfig& cfg, double h) {
    verify::FamilySetup s = cfg.setup;
    s.h = h;
    if (cfg.rho_scale != 1.0) return verify::negative_control(cfg.params, cfg.rho_scale, s);
    return verify::verify_family(cfg.params, s);
}

} // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constructs and verifies the k1 = 0 family of parallel mean curvature surfaces", "pmclab"};
    app.require_subcommand(1, 1);
    // "--h" is the step, so help is long-form only.
    app.set_help_flag("--help", "print help and exit");

    Invocation inv;
    double interval_c3 = 0.0;
    auto* interval = app.add_subcommand("interval", "print the admissible sin^2(alpha) interval for c3");
    interval->add_option("--c3", interval_c3, "integration constant")->required();

    auto* family_cmd = app.add_subcommand("family", "integrate the family and write the grid");
    add_run_options(family_cmd, inv);

    auto* verify_cmd = app.add_subcommand("verify", "run the residual suite; exit 0 iff every residual passes");
    add_run_options(verify_cmd, inv);
    add_option(verify_cmd, inv, "rho-scale", "rebuild with rho = -3 b^2 * rho_scale (negative control)");

    auto* conv_cmd = app.add_subcommand("convergence", "empirical orders over a list of steps");
    add_run_options(conv_cmd, inv);
    add_option(conv_cmd, inv, "h-list", "comma separated steps, geometric, decreasing");

    auto* sweep_cmd = app.add_subcommand("sweep", "tabulate curvature and gamma over a c3 range");
    add_option(sweep_cmd, inv, "b", "mean curvature parameter");
    add_option(sweep_cmd, inv, "c3-min", "first c3");
    add_option(sweep_cmd, inv, "c3-max", "last c3");
    add_option(sweep_cmd, inv, "steps", "number of c3 values");
    add_option(sweep_cmd, inv, "samples", "sin^2 samples per interval");
    add_option(sweep_cmd, inv, "out", "output file (default stdout)");
    sweep_cmd->add_option("--config", inv.config_path, "flat key = value config file (default $PMCLAB_CONFIG)");

    std::map<std::string, std::string> tols;
    try {
        std::vector<std::string> rest = extract_tolerances(args_in, tols);
        std::reverse(rest.begin(), rest.end());
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!tols.empty() && !verify_cmd->parsed() && !conv_cmd->parsed()) {
        err << "usage error: --tol.<name> only applies to verify and convergence\n";
        return kExitUsage;
    }

    try {
        if (interval->parsed()) {
            for (const auto& iv : core::admissible_intervals(interval_c3)) out << describe_interval(iv) << '\n';
            return kExitPass;
        }

        const auto settings = merged_settings(inv, tols);

        if (sweep_cmd->parsed()) {
            SweepOptions o;
            for (const auto& [k, v] : settings) {
                if (k == "b") o.b = parse_real(k, v);
                else if (k == "c3-min") o.c3_min = parse_real(k, v);
                else if (k == "c3-max") o.c3_max = parse_real(k, v);
                else if (k == "steps") o.steps = parse_int(k, v);
                else if (k == "samples") o.samples = parse_int(k, v);
                else if (k.rfind("tol.", 0) != 0 && !known_keys().count(k)) throw UsageError("unknown setting '" + k + "'");
            }
            if (!(o.b > 0.0) || o.steps < 1 || o.samples < 1 || !(o.c3_min <= o.c3_max)) {
                throw UsageError("sweep needs b > 0, steps >= 1, samples >= 1 and c3-min <= c3-max");
            }
            const auto rows = sweep(o);
            std::ostringstream ss;
            write_sweep_csv(rows, ss);
            const auto* path = find(settings, std::string("out"));
            emit(path ? *path : "", out, ss.str());
            std::size_t bad = 0;
            for (const auto& r : rows) bad += (r.bound_ok.value_or(true) && r.gamma_ok) ? 0 : 1;
            err << rows.size() << " rows, " << bad << " with a failed check\n";
            return bad == 0 ? kExitPass : kExitVerifyFail;
        }

        if (family_cmd->parsed()) {
            const RunConfig cfg = config_from_settings(settings, OutputFormat::CSV);
            const auto grid = verify::build_family_grid(cfg.params, cfg.setup);
            const auto& prof = grid.profile;
            err << "stop_reason: forward " << family::to_string(prof.forward_stop) << ", backward "
                << family::to_string(prof.backward_stop) << "; " << grid.u_count() << " u-nodes on ["
                << prof.u_nodes.front() << ", " << prof.u_nodes.back() << "]\n";
            if (!grid.invalid_u.empty()) {
                err << "warning: |c|^2 < 0 at " << grid.invalid_u.size() << " u-nodes; c is written as nan\n";
            }
            if (prof.stop_reason == family::StopReason::StepUnderflow) {
                err << "integration failed: step underflow away from the endpoints\n";
                return kExitIntegration;
            }
            std::ostringstream ss;
            if (cfg.format == OutputFormat::CSV) {
                write_grid_csv(grid, ss);
            } else {
                ss << grid_to_json(grid).dump(2) << '\n';
            }
            emit(cfg.out, out, ss.str());
            return kExitPass;
        }

        if (verify_cmd->parsed()) {
            const RunConfig cfg = config_from_settings(settings, OutputFormat::JSON);
            if (cfg.rho_scale == 1.0 && settings.count("rho-scale")) {
                err << "note: rho-scale = 1 is the unperturbed family\n";
            }
            auto report = run_verification(cfg, cfg.setup.h);
            const auto fine = run_verification(cfg, 0.5 * cfg.setup.h);
            verify::attach_orders(report, fine);
            std::ostringstream ss;
            if (cfg.format == OutputFormat::JSON) {
                ss << report_to_json(report).dump(2) << '\n';
            } else {
                write_report_csv(report, ss);
            }
            emit(cfg.out, out, ss.str());
            print_summary(report, cfg.out.empty() || cfg.out == "-" ? err : out);
            return report.verdict ? kExitPass : kExitVerifyFail;
        }

        if (conv_cmd->parsed()) {
            std::vector<double> h_list{2e-3, 1e-3, 5e-4};
            if (auto v = find(settings, std::string("h-list"))) h_list = parse_list("h-list", *v);
            const RunConfig cfg = config_from_settings(settings, OutputFormat::CSV);
            const auto table = verify::convergence_study(cfg.params, cfg.setup, h_list);
            std::ostringstream ss;
            write_convergence_csv(table, ss);
            emit(cfg.out, out, ss.str());
            return kExitPass;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PmcError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
    return kExitUsage;
}

} // namespace pmclab::cli
