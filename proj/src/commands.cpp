#include "gbcorr/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "gbcorr/correlation.hpp"
#include "gbcorr/errors.hpp"
#include "gbcorr/estimates.hpp"
#include "gbcorr/fit.hpp"
#include "gbcorr/fock.hpp"
#include "gbcorr/parallel.hpp"
#include "gbcorr/report.hpp"
#include "gbcorr/verify.hpp"

namespace gbcorr {

namespace fs = std::filesystem;

int guarded(const std::function<int()>& body, std::ostream& err)
{
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}

namespace {

std::string kf_label(double kF)
{
    std::ostringstream os;
    os << kF;
    return os.str();
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.output_dir) / name).string(); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json config_json(const RunConfig& cfg)
{
    Json j;
    for (const auto& [k, v] : describe(cfg)) j[k] = v;
    return j;
}

CorrelationOptions correlation_options(const RunConfig& cfg)
{
    CorrelationOptions co;
    co.kmax_factor_bos = cfg.kmax_factor_bos;
    co.kmax_factor_ex = cfg.kmax_factor_ex;
    co.quad_rel_tol = cfg.quad_tol;
    co.with_trace = cfg.with_trace;
    co.with_eb6 = cfg.with_eb6;
    co.threads = resolve_threads(cfg.threads);
    return co;
}

std::vector<CorrelationReport> run_reports(const RunConfig& cfg, std::ostream& out)
{
    validate_config(cfg);
    const auto co = correlation_options(cfg);
    std::vector<CorrelationReport> reps;
    for (double kF : cfg.kf_list) {
        reps.push_back(compute_correlation(kF, cfg.beta, cfg.potential, co));
        const auto& r = reps.back();
        out << "k_F=" << kf_label(kF) << "  e_bos=" << format_double(r.e_bos_quadrature)
            << "  e_bos_trace=" << format_double(r.e_bos_trace) << "  e_ex=" << format_double(r.e_ex)
            << "  e_second_order=" << format_double(r.e_second_order) << "  e_b6=" << format_double(r.e_b6) << "\n";
    }
    return reps;
}

void write_summary(const RunConfig& cfg, const std::vector<CorrelationReport>& reps, const std::string& stem)
{
    if (cfg.wants("csv")) write_text_file(path_in(cfg, stem + ".csv"), summary_csv(reps));
    if (cfg.wants("json")) {
        Json j;
        j["config"] = config_json(cfg);
        j["reports"] = Json::array();
        for (const auto& r : reps) {
            Json x = to_json(r);
            x.erase("per_orbit");
            j["reports"].push_back(std::move(x));
        }
        write_text_file(path_in(cfg, stem + ".json"), dump(j));
    }
    if (cfg.wants("svg") && reps.size() >= 2) {
        PlotSpec p;
        p.title = "correlation energies, " + cfg.potential.descriptor() + ", beta=" + kf_label(cfg.beta);
        p.xlabel = "k_F";
        p.ylabel = "energy";
        PlotSeries bos{"E_corr,bos", {}, {}, true}, ex{"E_corr,ex", {}, {}, true}, so{"second order", {}, {}, true};
        for (const auto& r : reps) {
            bos.x.push_back(r.k_F);
            bos.y.push_back(r.e_bos_quadrature);
            ex.x.push_back(r.k_F);
            ex.y.push_back(r.e_ex);
            so.x.push_back(r.k_F);
            so.y.push_back(r.e_second_order);
        }
        p.series = {bos, so, ex};
        write_text_file(path_in(cfg, stem + ".svg"), svg_plot(p));
    }
}

bool coulomb_unit_beta(const RunConfig& cfg) { return cfg.potential.kind == PotentialKind::coulomb && cfg.beta == 1.0; }

std::string series_column(const std::string& series)
{
    if (series == "bos") return "e_bos_quadrature";
    if (series == "ex") return "e_ex";
    return "budget_ratio";
}

}  // namespace

int cmd_compute(const RunConfig& cfg, std::ostream& out)
{
    const auto reps = run_reports(cfg, out);
    for (const auto& r : reps) {
        const auto stem = "correlation_kF" + kf_label(r.k_F);
        if (cfg.wants("csv")) write_text_file(path_in(cfg, stem + ".csv"), orbit_csv(r));
        if (cfg.wants("json")) write_text_file(path_in(cfg, stem + ".json"), dump(to_json(r)));
    }
    write_summary(cfg, reps, "summary");
    return exit_ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    const auto reps = run_reports(cfg, out);
    write_summary(cfg, reps, "sweep");
    return exit_ok;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out)
{
    validate_config(cfg);
    std::vector<double> x, y;
    if (!cfg.fit_input.empty()) {
        std::ifstream f(cfg.fit_input, std::ios::binary);
        if (!f) throw ValidationError("config key 'fit.input': cannot read '" + cfg.fit_input + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        x = read_csv_column(ss.str(), "k_F");
        y = read_csv_column(ss.str(), series_column(cfg.series));
    } else {
        const int threads = resolve_threads(cfg.threads);
        for (double kF : cfg.kf_list) {
            double v = 0.0;
            if (cfg.series == "ex") {
                v = e_corr_ex(kF, cfg.beta, cfg.potential, std::max(1.0, cfg.kmax_factor_ex * kF), threads).value;
            } else {
                BosOptions bo;
                bo.rel_tol = cfg.quad_tol;
                bo.with_trace = false;
                bo.threads = threads;
                const double bos =
                    e_corr_bos(kF, cfg.beta, cfg.potential, std::max(1.0, cfg.kmax_factor_bos * kF), bo).value;
                if (cfg.series == "bos") {
                    v = bos;
                } else {
                    const auto eb = error_budget(kF, cfg.beta, cfg.potential, cfg.epsilon);
                    v = bound_ratio(eb.fermi_state_envelope(), std::abs(bos));
                }
            }
            x.push_back(kF);
            y.push_back(v);
        }
    }
    const bool klogk = cfg.series == "bos" && coulomb_unit_beta(cfg);
    const AsymptoticFit f = klogk ? fit_klogk(x, y) : fit_power_law(x, y);

    Json j;
    j["series"] = cfg.series;
    j["config"] = config_json(cfg);
    j["fit"] = to_json(f);
    double reference = NAN;
    if (!klogk) {
        reference = cfg.series == "budget_ratio" ? -1.0 / 6.0 + cfg.epsilon : 3.0 - 2.0 * cfg.beta;
        j["reference_exponent"] = reference;
    }
    if (cfg.wants("json")) write_text_file(path_in(cfg, "fit_" + cfg.series + ".json"), dump(j));
    if (cfg.wants("csv")) {
        CsvTable t({"k_F", series_column(cfg.series), "fitted", "residual"});
        for (std::size_t i = 0; i < x.size(); ++i)
            t.row({format_double(x[i]), format_double(y[i]), format_double(f.predict(x[i])),
                   format_double(f.residuals[i])});
        write_text_file(path_in(cfg, "fit_" + cfg.series + ".csv"), t.str());
    }
    if (cfg.wants("svg")) write_text_file(path_in(cfg, "fit_" + cfg.series + ".svg"), svg_fit_plot(f, cfg.series, cfg.series));

    out << "model " << to_string(f.model) << "\n";
    if (klogk)
        out << "a = " << format_double(f.coefficients[0]) << "\nb = " << format_double(f.coefficients[1]) << "\n";
    else
        out << "a = " << format_double(f.coefficients[0]) << "\nexponent = " << format_double(f.coefficients[1])
            << "  (reference " << format_double(reference) << ")\n";
    out << "r_squared = " << format_double(f.r_squared) << "\nlast relative residual = "
        << format_double(f.last_relative_residual()) << "\n";
    return exit_ok;
}

namespace {

VerifyOptions verify_options(const RunConfig& cfg)
{
    VerifyOptions o;
    o.kf_list = cfg.kf_list;
    o.beta = cfg.beta;
    o.model = cfg.potential;
    o.epsilon = cfg.epsilon;
    o.threads = resolve_threads(cfg.threads);
    o.trend_limit = cfg.trend_limit;
    o.orbit_factor = cfg.orbit_factor;
    o.instances = cfg.onebody_instances;
    o.seed = cfg.onebody_seed;
    return o;
}

SuiteResult fock_suite(const RunConfig& cfg)
{
    SuiteResult res;
    res.suite = "fock";
    std::vector<fock::Arithmetic> modes;
    if (cfg.fock_arithmetic != "extended") modes.push_back(fock::Arithmetic::rational);
    if (cfg.fock_arithmetic != "rational") modes.push_back(fock::Arithmetic::extended);
    for (auto a : modes) {
        fock::SuiteOptions o;
        o.k_F = cfg.fock_kf;
        o.arithmetic = a;
        o.seed = cfg.fock_seed;
        o.trials = cfg.fock_trials;
        o.model = cfg.potential;
        o.beta = cfg.beta;
        const auto rep = fock::run_suite(o);
        for (const auto& c : rep.checks) {
            BoundCheck b;
            b.name = c.name + ":" + fock::to_string(a);
            b.k_F = cfg.fock_kf;
            b.beta = cfg.beta;
            b.epsilon = cfg.epsilon;
            b.lhs = c.residual;
            b.rhs_envelope = a == fock::Arithmetic::rational ? 0.0 : o.tolerance;
            b.ratio = bound_ratio(b.lhs, b.rhs_envelope);
            b.pass = c.pass;
            b.context = std::to_string(c.cases) + " cases" + (c.detail.empty() ? "" : "; " + c.detail);
            res.rows.push_back(std::move(b));
        }
    }
    return res;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out, std::ostream& err)
{
    validate_config(cfg);
    if (suite != "bounds" && suite != "fock" && suite != "onebody" && suite != "all")
        throw ValidationError("unknown suite '" + suite + "'");
    std::vector<SuiteResult> results;
    const auto opt = verify_options(cfg);
    if (suite == "bounds" || suite == "all") results.push_back(verify_bounds(opt));
    if (suite == "fock" || suite == "all") results.push_back(fock_suite(cfg));
    if (suite == "onebody" || suite == "all") results.push_back(verify_onebody(opt));

    std::vector<BoundCheck> all;
    Json j;
    j["suite"] = suite;
    j["config"] = config_json(cfg);
    j["suites"] = Json::array();
    bool pass = true;
    for (const auto& r : results) {
        Json s;
        s["name"] = r.suite;
        s["pass"] = r.pass();
        s["checks"] = Json::array();
        for (const auto& b : r.rows) {
            s["checks"].push_back(to_json(b));
            all.push_back(b);
            out << (b.pass ? "PASS " : "FAIL ") << r.suite << " " << b.name;
            if (b.k_F > 0.0) out << " k_F=" << kf_label(b.k_F);
            out << " lhs=" << format_double(b.lhs) << " envelope=" << format_double(b.rhs_envelope) << "\n";
        }
        j["suites"].push_back(std::move(s));
        pass = pass && r.pass();
    }
    j["pass"] = pass;
    if (cfg.wants("json")) write_text_file(path_in(cfg, "verify_" + suite + ".json"), dump(j));
    if (cfg.wants("csv")) write_text_file(path_in(cfg, "verify_" + suite + ".csv"), bound_csv(all));
    if (!pass) {
        err << "verification failed:";
        for (const auto& r : results)
            for (const auto& n : r.failing()) err << " " << r.suite << "/" << n;
        err << "\n";
        return exit_verification;
    }
    return exit_ok;
}

int cmd_report(const RunConfig& cfg, std::ostream& out)
{
    validate_config(cfg);
    const std::string input = cfg.fit_input.empty() ? path_in(cfg, "sweep.csv") : cfg.fit_input;
    std::ifstream f(input, std::ios::binary);
    if (!f) throw ValidationError("report: cannot read '" + input + "' (run sweep first or set fit.input)");
    std::stringstream ss;
    ss << f.rdbuf();
    const auto text = ss.str();
    const auto x = read_csv_column(text, "k_F");
    const auto bos = read_csv_column(text, "e_bos_quadrature");
    const auto ex = read_csv_column(text, "e_ex");
    const auto so = read_csv_column(text, "e_second_order");

    Json j;
    j["input"] = fs::path(input).filename().string();
    j["k_F"] = x;
    if (x.size() >= min_fit_points) {
        const bool klogk = coulomb_unit_beta(cfg);
        const auto fb = klogk ? fit_klogk(x, bos) : fit_power_law(x, bos);
        j["fit_bos"] = to_json(fb);
        if (cfg.wants("svg")) write_text_file(path_in(cfg, "report_bos_fit.svg"), svg_fit_plot(fb, "E_corr,bos", "energy"));
        bool positive = true;
        for (double v : ex) positive = positive && v > 0.0;
        if (positive) {
            const auto fe = fit_power_law(x, ex);
            j["fit_ex"] = to_json(fe);
            j["fit_ex_reference_exponent"] = 3.0 - 2.0 * cfg.beta;
            if (cfg.wants("svg")) write_text_file(path_in(cfg, "report_ex_fit.svg"), svg_fit_plot(fe, "E_corr,ex", "energy"));
        }
        out << "bos fit: " << to_string(fb.model) << " coefficients " << format_double(fb.coefficients[0]) << ", "
            << format_double(fb.coefficients[1]) << "\n";
    } else {
        out << "fewer than " << min_fit_points << " points; plots only\n";
    }
    if (cfg.wants("svg")) {
        PlotSpec p;
        p.title = "E_corr,bos / k_F and E_corr,ex / k_F";
        p.xlabel = "k_F";
        p.ylabel = "energy / k_F";
        PlotSeries a{"E_corr,bos / k_F", x, {}, true}, b{"E_corr,ex / k_F", x, {}, true}, c{"second order / k_F", x, {}, true};
        for (std::size_t i = 0; i < x.size(); ++i) {
            a.y.push_back(bos[i] / x[i]);
            b.y.push_back(ex[i] / x[i]);
            c.y.push_back(so[i] / x[i]);
        }
        p.series = {a, c, b};
        write_text_file(path_in(cfg, "report_per_kF.svg"), svg_plot(p));
    }
    if (cfg.wants("json")) write_text_file(path_in(cfg, "report.json"), dump(j));
    return exit_ok;
}

}  // namespace gbcorr
