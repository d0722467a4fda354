// acceptance gate: one PASS/FAIL line per criterion; exit status 1 on any failure not passed to --known-fail

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gbcorr/commands.hpp"
#include "gbcorr/correlation.hpp"
#include "gbcorr/estimates.hpp"
#include "gbcorr/fit.hpp"
#include "gbcorr/fock.hpp"
#include "gbcorr/parallel.hpp"
#include "gbcorr/quadrature.hpp"
#include "gbcorr/verify.hpp"

using namespace gbcorr;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double spread(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

const PotentialModel coulomb = PotentialModel::coulomb(1.0);
const int threads = default_threads();

Outcome dual_path()
{
    const auto t0 = Clock::now();
    double worst_mode = 0.0, worst_total = 0.0;
    std::size_t modes = 0;
    bool ok = true;
    for (double kF : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        BosOptions o;
        o.threads = threads;
        const auto b = e_corr_bos(kF, 1.0, coulomb, 4 * kF, o);
        for (const auto& r : b.rows) {
            const double d = std::abs(r.bos_term - r.trace_term) / (1 + std::abs(r.trace_term));
            worst_mode = std::max(worst_mode, d);
            ok = ok && d <= 1e-8;
            ++modes;
        }
        const double rel = std::abs(b.value - b.trace_value) / std::abs(b.trace_value);
        worst_total = std::max(worst_total, rel);
        ok = ok && rel <= 1e-7;
    }
    const double dt = seconds_since(t0);
    return {ok && dt <= 60.0, fmt("%zu orbits, worst per-mode %.2e, worst total %.2e, %.1f s", modes, worst_mode,
                                  worst_total, dt)};
}

Outcome single_point()
{
    Lune L;
    L.k = {1, 0, 0};
    L.points = {{1, 0, 0}};
    L.lambdas = {1.0};
    L.two_lambdas = {2};
    const auto b = bos_term(spectral_bins(L), 1.0, 1e-13);
    const double err = std::abs(b.value - (std::sqrt(3.0) - 2.0));
    return {err <= 1e-10, fmt("value %.15f, error %.2e", b.value, err)};
}

Outcome lorentzians()
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double a = i == 0 ? 1.0 : u(rng), b = i == 0 ? 1.0 : u(rng);
        QuadOptions q;
        q.abs_tol = 1e-15;
        q.rel_tol = 1e-13;
        const auto r = integrate_to_infinity([&](double t) { return a / (a * a + t * t) * b / (b * b + t * t); }, 0.0, q);
        worst = std::max(worst, std::abs(r.value - pi / (2 * (a + b))));
    }
    return {worst <= 1e-10, fmt("20 pairs including a=b=1, worst error %.2e", worst)};
}

Outcome rank_one()
{
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ua(0.1, 10.0), uv(0.01, 3.0);
    std::uniform_int_distribution<int> udim(1, 20);
    double fr = 0.0, sw = -INFINITY, cs = -INFINITY;
    for (int t = 0; t < 100; ++t) {
        const int n = udim(rng);
        Eigen::VectorXd h(n), v(n);
        for (int i = 0; i < n; ++i) h(i) = ua(rng), v(i) = uv(rng);
        const auto r = rank_one_instance(h, v);
        fr = std::max(fr, r.fourth_root_error);
        sw = std::max(sw, r.sandwich_violation);
        cs = std::max(cs, r.cs_violation);
    }
    return {fr <= 1e-6 && sw <= 1e-12 && cs <= 1e-12,
            fmt("100 instances, max entry error %.2e, largest sandwich excess %.2e, C/S excess %.2e", fr, sw, cs)};
}

Outcome one_body_ratios()
{
    std::vector<double> s, sr, c;
    bool finite = true;
    for (int kf = 1; kf <= 8; ++kf) {
        const double kF = kf;
        const FermiRadius r(kF);
        const auto ball = fermi_ball(r);
        const auto orb = orbits(2 * kF);
        ElementRatios m;
        for (const auto& k : orb.representatives) {
            const auto bm = build_binned_mode(k, lune_bins(r, ball, k), mode_coupling(kF, 1.0, coulomb, k));
            const auto e = element_ratios(bm, kF, 1.0, v_hat(coulomb, k));
            m.s = std::max(m.s, e.s);
            m.c = std::max(m.c, e.c);
            m.s_refined = std::max(m.s_refined, e.s_refined);
        }
        finite = finite && std::isfinite(m.s) && std::isfinite(m.s_refined) && m.s > 0 && m.s_refined > 0;
        s.push_back(m.s);
        sr.push_back(m.s_refined);
        c.push_back(m.c);
    }
    const double a = spread(s), b = spread(sr);
    return {finite && a <= 2.0 && b <= 2.0,
            fmt("S ratio %.4e..%.4e (x%.3f), refined %.4e..%.4e (x%.3f), C ratio x%.3f (reported)",
                *std::min_element(s.begin(), s.end()), *std::max_element(s.begin(), s.end()), a,
                *std::min_element(sr.begin(), sr.end()), *std::max_element(sr.begin(), sr.end()), b, spread(c))};
}

Outcome kinetic_scaling()
{
    std::vector<double> x, y;
    double closest = INFINITY;
    for (int kf = 4; kf <= 48; ++kf) {
        const double kF = kf;
        x.push_back(kF);
        y.push_back(kinetic_sum_ball(kF, 2 * kF));
        const FermiRadius r(kF);
        const double z = zeta(r);
        const auto t = r3_table(4 * kf * kf);
        for (std::size_t n = 0; n < t.size(); ++n)
            if (t[n]) closest = std::min(closest, std::abs(double(n) - z));
    }
    const double slope = loglog_slope(x, y);
    return {slope <= 1.2 && closest >= 0.5, fmt("slope %.4f over k_F 4..48, min ||p|^2 - zeta| = %.2f", slope, closest)};
}

Outcome lune_sums()
{
    double inv = 0.0, size = 0.0;
    std::size_t beyond = 0;
    bool exact = true;
    for (int kf = 1; kf <= 8; ++kf) {
        const double kF = kf;
        const FermiRadius r(kF);
        const auto ball = fermi_ball(r);
        for (const auto& k : orbits(2 * kF + 3).representatives) {
            const auto bins = lune_bins(r, ball, k);
            if (k.norm_sq() > 4 * kf * kf) {
                exact = exact && bins.total == static_cast<std::int64_t>(ball.N);
                ++beyond;
                continue;
            }
            const auto st = lune_stats(r, bins, k);
            inv = std::max(inv, st.ratio_inv);
            size = std::max(size, st.ratio_size);
        }
    }
    return {std::isfinite(inv) && std::isfinite(size) && exact,
            fmt("max sum(1/lambda)/k_F %.4f, max |L_k|/(k_F^2 min(|k|,k_F)) %.4f, |L_k| = N on %zu orbits beyond 2k_F",
                inv, size, beyond)};
}

// E_corr,bos on the Coulomb grid, shared by the asymptotic fit and the error budget
struct BosGrid {
    std::vector<double> kf, e;
    double seconds = 0.0;
};

const BosGrid& bos_grid()
{
    static std::optional<BosGrid> g;
    if (g) return *g;
    g.emplace();
    const auto t0 = Clock::now();
    for (int kf = 4; kf <= 24; ++kf) {
        BosOptions o;
        o.rel_tol = 1e-9;
        o.with_trace = false;
        o.threads = threads;
        g->kf.push_back(kf);
        g->e.push_back(e_corr_bos(kf, 1.0, coulomb, 4.0 * kf, o).value);
    }
    g->seconds = seconds_since(t0);
    return *g;
}

Outcome coulomb_fit()
{
    const auto& g = bos_grid();
    const auto f = fit_klogk(g.kf, g.e);
    const double a = f.coefficients[0];
    bool below = true;
    for (std::size_t i = 0; i < g.kf.size(); ++i) below = below && g.e[i] <= -0.1 * std::abs(a) * g.kf[i];
    const double res = f.last_relative_residual();
    return {a < 0 && res <= 0.05 && below && g.seconds <= 600,
            fmt("a = %.6e, b = %.6e, residual at k_F=24 %.2e, R^2 %.6f, %.0f s", a, f.coefficients[1], res,
                f.r_squared, g.seconds)};
}

double brute_exchange(double kF, double Kmax)
{
    double total = 0.0;
    for (const auto& k : ball_points(max_norm_within(Kmax), false)) {
        const auto L = lune(kF, k);
        double inner = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i)
            for (std::size_t j = 0; j < L.size(); ++j)
                inner += coulomb.of_norm((L.points[i] + L.points[j] - k).norm_sq()) / (L.lambdas[i] + L.lambdas[j]);
        total += coulomb.of_norm(k.norm_sq()) * inner;
    }
    return total / (kF * kF) / (4.0 * two_pi_cubed * two_pi_cubed);
}

Outcome exchange()
{
    const auto t0 = Clock::now();
    bool nonneg = true;
    std::vector<double> ratio;
    for (int kf = 2; kf <= 8; ++kf) {
        const auto ex = e_corr_ex(kf, 1.0, coulomb, 2.0 * kf, threads);
        nonneg = nonneg && ex.value >= 0.0;
        for (const auto& r : ex.rows) nonneg = nonneg && r.ex_term >= 0.0;
        ratio.push_back(ex.value / kf);
    }
    double oracle = 0.0;
    for (double kF : {1.0, 2.0, 3.0}) {
        const double v = e_corr_ex(kF, 1.0, coulomb, 2 * kF).value;
        oracle = std::max(oracle, std::abs(v - brute_exchange(kF, 2 * kF)) / v);
    }
    const double dt = seconds_since(t0);
    return {nonneg && spread(ratio) <= 3.0 && oracle <= 1e-10 && dt <= 600,
            fmt("E_ex/k_F %.4e..%.4e (x%.3f), pair-loop oracle rel diff %.2e, %.0f s",
                *std::min_element(ratio.begin(), ratio.end()), *std::max_element(ratio.begin(), ratio.end()),
                spread(ratio), oracle, dt)};
}

Outcome eb6()
{
    std::string detail;
    bool ok = true;
    for (double beta : {0.95, 1.0}) {
        std::vector<double> C;
        for (int kf = 2; kf <= 6; ++kf) {
            const auto r = eb6_exchange(kf, beta, coulomb, 2.0 * kf, threads);
            C.push_back(r.deviation / (std::pow(kf, 3 * (1 - beta)) * r.sum_v_cubed));
        }
        const double s = spread(C);
        ok = ok && s <= 3.0 && std::all_of(C.begin(), C.end(), [](double c) { return std::isfinite(c) && c > 0; });
        detail += fmt("%sbeta=%.2f: C %.4e..%.4e (x%.3f)", detail.empty() ? "" : "; ", beta,
                      *std::min_element(C.begin(), C.end()), *std::max_element(C.begin(), C.end()), s);
    }
    return {ok, detail};
}

Outcome second_order_remainder()
{
    std::vector<double> g, rem;
    for (double c : {1e-1, 1e-2, 1e-3, 1e-4}) {
        BosOptions o;
        o.rel_tol = 1e-13;
        o.with_trace = false;
        o.with_second_order = true;
        o.threads = threads;
        const auto b = e_corr_bos(3.0, 1.0, PotentialModel::coulomb(c), 12.0, o);
        g.push_back(c);
        rem.push_back(std::abs(b.value - b.second_order));
    }
    const double slope = loglog_slope(g, rem);
    return {slope >= 2.9, fmt("exponent %.4f (remainders %.3e .. %.3e)", slope, rem.front(), rem.back())};
}

Outcome fock_suite()
{
    const auto t0 = Clock::now();
    bool ok = true;
    std::size_t checks = 0;
    double worst_ext = 0.0;
    std::string failing;
    for (auto a : {fock::Arithmetic::rational, fock::Arithmetic::extended}) {
        fock::SuiteOptions o;
        o.arithmetic = a;
        const auto rep = fock::run_suite(o);
        for (const auto& c : rep.checks) {
            ++checks;
            // the per-mode trace identity is a floating-point check in either mode
            const bool exact = a == fock::Arithmetic::rational && c.name != "trace_identity";
            const bool good = c.pass && (exact ? c.residual == 0.0 : c.residual <= 1e-10);
            if (!exact) worst_ext = std::max(worst_ext, c.residual);
            if (!good) failing += " " + c.name;
            ok = ok && good;
        }
    }
    const double dt = seconds_since(t0);
    return {ok && dt <= 120, fmt("%zu checks, rational residuals 0, float worst %.2e, %.1f s%s", checks, worst_ext, dt,
                                 failing.empty() ? "" : ("; failing:" + failing).c_str())};
}

Outcome budget_separation()
{
    const auto& g = bos_grid();
    std::vector<double> ratio;
    for (std::size_t i = 0; i < g.kf.size(); ++i)
        ratio.push_back(error_budget(g.kf[i], 1.0, coulomb, 0.1).fermi_state_envelope() / std::abs(g.e[i]));
    const auto f = fit_power_law(g.kf, ratio);
    const double c = f.coefficients[1];
    return {c < 0 && c >= -0.30 && c <= -0.05, fmt("exponent %.4f (reference -1/6 + 0.1 = %.4f)", c, -1.0 / 6 + 0.1)};
}

std::map<std::string, std::string> read_tree(const fs::path& dir)
{
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        m[fs::relative(e.path(), dir).string()] = os.str();
    }
    return m;
}

Outcome determinism()
{
    unsetenv("GBCORR_THREADS");
    const auto root = fs::temp_directory_path() / "gbcorr_acceptance_threads";
    fs::remove_all(root);
    std::vector<int> counts{1, 4, std::max(default_threads(), 2)};
    std::vector<std::map<std::string, std::string>> trees;
    for (int t : counts) {
        RunConfig cfg;
        cfg.kf_list = {1.0, 2.0, 3.0, 4.0};
        cfg.threads = t;
        cfg.output_dir = (root / std::to_string(t)).string();
        std::ostringstream out, err;
        int rc = cmd_compute(cfg, out);
        rc |= cmd_sweep(cfg, out);
        rc |= cmd_verify(cfg, "bounds", out, err);
        if (rc != 0) return {false, "commands failed: " + err.str()};
        trees.push_back(read_tree(cfg.output_dir));
    }
    bool same = trees[0] == trees[1] && trees[0] == trees[2];
    std::size_t bytes = 0;
    for (const auto& [k, v] : trees[0]) bytes += v.size();
    fs::remove_all(root);
    return {same && !trees[0].empty(),
            fmt("threads %d/%d/%d, %zu files, %zu bytes each, %s", counts[0], counts[1], counts[2], trees[0].size(),
                bytes, same ? "identical" : "DIFFER")};
}

}  // namespace

// --known-fail 6,9 lists criteria whose FAIL is reported but does not set the exit status
std::vector<int> known_failures(int argc, char** argv)
{
    std::vector<int> out;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--known-fail") continue;
        std::stringstream ss(argv[i + 1]);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
    return out;
}

int main(int argc, char** argv)
{
    const auto known = known_failures(argc, argv);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dual-path bosonic identity", dual_path},
        {"single-point closed form", single_point},
        {"Lorentzian product integral", lorentzians},
        {"rank-one fourth roots and sandwich bounds", rank_one},
        {"one-body element ratios", one_body_ratios},
        {"kinetic sum scaling", kinetic_scaling},
        {"lune sums", lune_sums},
        {"Coulomb k log k asymptotics", coulomb_fit},
        {"exchange term", exchange},
        {"E_B6 against exchange", eb6},
        {"second-order remainder", second_order_remainder},
        {"Fock oracle suite", fock_suite},
        {"error-budget separation", budget_separation},
        {"thread determinism", determinism},
    };
    int failed = 0, tolerated = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool is_known = std::find(known.begin(), known.end(), int(i + 1)) != known.end();
        if (!o.pass) (is_known ? tolerated : failed)++;
        std::printf("%s %2zu %s: %s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(),
                    !o.pass && is_known ? " [known failure]" : "");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed", failed + tolerated, criteria.size());
    if (tolerated) std::printf(" (%d known)", tolerated);
    std::printf("\n");
    return failed ? 1 : 0;
}
