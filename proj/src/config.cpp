#include "gbcorr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gbcorr/errors.hpp"
#include "gbcorr/lattice.hpp"

namespace gbcorr {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why)
{
    throw ValidationError("config key '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x)) bad_value(key, v, "not a finite number");
    return x;
}

std::int64_t to_int(const std::string& key, const std::string& v)
{
    std::int64_t x = 0;
    const auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size()) bad_value(key, v, "not an integer");
    return x;
}

bool to_bool(const std::string& key, const std::string& v)
{
    const auto s = trim(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, v, "not a boolean");
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

bool RunConfig::wants(const std::string& format) const
{
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "kf_list",        "beta",          "potential.kind",  "potential.coupling", "potential.param",
        "potential.cv",   "kmax_factor_bos", "kmax_factor_ex", "quad_tol",          "epsilon",
        "threads",        "output_dir",    "formats",         "with_trace",         "with_eb6",
        "series",         "fit.input",     "fock.kf",         "fock.arithmetic",    "fock.seed",
        "fock.trials",    "verify.trend_limit", "verify.orbit_factor", "onebody.instances", "onebody.seed"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    if (key == "kf_list") {
        cfg.kf_list.clear();
        for (const auto& s : split_list(v)) cfg.kf_list.push_back(to_double(key, s));
        if (cfg.kf_list.empty()) bad_value(key, value, "empty list");
    } else if (key == "beta") {
        cfg.beta = to_double(key, v);
    } else if (key == "potential.kind") {
        try {
            cfg.potential.kind = parse_potential_kind(v);
        } catch (const ValidationError&) {
            bad_value(key, value, "unknown potential kind");
        }
    } else if (key == "potential.coupling") {
        cfg.potential.coupling = to_double(key, v);
    } else if (key == "potential.param") {
        cfg.potential.param = to_double(key, v);
    } else if (key == "potential.cv") {
        cfg.potential.declared_cv = to_double(key, v);
    } else if (key == "kmax_factor_bos") {
        cfg.kmax_factor_bos = to_double(key, v);
    } else if (key == "kmax_factor_ex") {
        cfg.kmax_factor_ex = to_double(key, v);
    } else if (key == "quad_tol") {
        cfg.quad_tol = to_double(key, v);
    } else if (key == "epsilon") {
        cfg.epsilon = to_double(key, v);
    } else if (key == "threads") {
        cfg.threads = static_cast<int>(to_int(key, v));
    } else if (key == "output_dir") {
        if (v.empty()) bad_value(key, value, "empty path");
        cfg.output_dir = v;
    } else if (key == "formats") {
        cfg.formats = split_list(v);
        for (const auto& f : cfg.formats)
            if (f != "csv" && f != "json" && f != "svg") bad_value(key, value, "formats are csv, json, svg");
    } else if (key == "with_trace") {
        cfg.with_trace = to_bool(key, v);
    } else if (key == "with_eb6") {
        cfg.with_eb6 = to_bool(key, v);
    } else if (key == "series") {
        if (v != "bos" && v != "ex" && v != "budget_ratio") bad_value(key, value, "series is bos, ex or budget_ratio");
        cfg.series = v;
    } else if (key == "fit.input") {
        cfg.fit_input = v;
    } else if (key == "fock.kf") {
        cfg.fock_kf = to_double(key, v);
    } else if (key == "fock.arithmetic") {
        if (v != "rational" && v != "extended" && v != "both") bad_value(key, value, "rational, extended or both");
        cfg.fock_arithmetic = v;
    } else if (key == "fock.seed") {
        cfg.fock_seed = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "fock.trials") {
        cfg.fock_trials = static_cast<int>(to_int(key, v));
    } else if (key == "verify.trend_limit") {
        cfg.trend_limit = to_double(key, v);
    } else if (key == "verify.orbit_factor") {
        cfg.orbit_factor = to_double(key, v);
    } else if (key == "onebody.instances") {
        cfg.onebody_instances = static_cast<int>(to_int(key, v));
    } else if (key == "onebody.seed") {
        cfg.onebody_seed = static_cast<std::uint64_t>(to_int(key, v));
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config(const std::string& text, RunConfig cfg)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value', key '" + line +
                                  "'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        apply_setting(cfg, key, line.substr(eq + 1));
    }
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void validate_config(const RunConfig& cfg)
{
    if (cfg.kf_list.empty()) throw ValidationError("config key 'kf_list': empty list");
    for (std::size_t i = 0; i < cfg.kf_list.size(); ++i) {
        const double kf = cfg.kf_list[i];
        if (!(kf > 0.0)) throw ValidationError("config key 'kf_list': values must be positive");
        if (i > 0 && !(kf > cfg.kf_list[i - 1])) throw ValidationError("config key 'kf_list': must be increasing");
        try {
            FermiRadius r(kf);
            (void)r;
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("config key 'kf_list': ") + e.what());
        }
    }
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw ValidationError("config key 'beta': must lie in (0,1]");
    if (!(cfg.potential.coupling >= 0.0)) throw ValidationError("config key 'potential.coupling': must be >= 0");
    if (!(cfg.kmax_factor_bos > 0.0)) throw ValidationError("config key 'kmax_factor_bos': must be positive");
    if (!(cfg.kmax_factor_ex > 0.0)) throw ValidationError("config key 'kmax_factor_ex': must be positive");
    if (!(cfg.quad_tol > 0.0 && cfg.quad_tol <= 1e-2)) throw ValidationError("config key 'quad_tol': must lie in (0, 1e-2]");
    if (!(cfg.epsilon > 0.0)) throw ValidationError("config key 'epsilon': must be positive");
    if (cfg.threads < 1) throw ValidationError("config key 'threads': must be >= 1");
    if (!(cfg.fock_kf > 0.0 && cfg.fock_kf <= 2.0)) throw ValidationError("config key 'fock.kf': must lie in (0, 2]");
    if (cfg.fock_trials < 1) throw ValidationError("config key 'fock.trials': must be >= 1");
    if (!(cfg.trend_limit > 0.0)) throw ValidationError("config key 'verify.trend_limit': must be positive");
    if (!(cfg.orbit_factor > 0.0)) throw ValidationError("config key 'verify.orbit_factor': must be positive");
    if (cfg.onebody_instances < 1) throw ValidationError("config key 'onebody.instances': must be >= 1");
}

std::map<std::string, std::string> describe(const RunConfig& cfg)
{
    std::map<std::string, std::string> m;
    std::string kfs;
    for (std::size_t i = 0; i < cfg.kf_list.size(); ++i) kfs += (i ? "," : "") + fmt(cfg.kf_list[i]);
    std::string formats;
    for (std::size_t i = 0; i < cfg.formats.size(); ++i) formats += (i ? "," : "") + cfg.formats[i];
    m["kf_list"] = kfs;
    m["beta"] = fmt(cfg.beta);
    m["potential.kind"] = to_string(cfg.potential.kind);
    m["potential.coupling"] = fmt(cfg.potential.coupling);
    m["potential.param"] = fmt(cfg.potential.param);
    if (!std::isnan(cfg.potential.declared_cv)) m["potential.cv"] = fmt(cfg.potential.declared_cv);
    m["kmax_factor_bos"] = fmt(cfg.kmax_factor_bos);
    m["kmax_factor_ex"] = fmt(cfg.kmax_factor_ex);
    m["quad_tol"] = fmt(cfg.quad_tol);
    m["epsilon"] = fmt(cfg.epsilon);
    m["formats"] = formats;
    m["with_trace"] = cfg.with_trace ? "true" : "false";
    m["with_eb6"] = cfg.with_eb6 ? "true" : "false";
    m["series"] = cfg.series;
    return m;
}

}  // namespace gbcorr
