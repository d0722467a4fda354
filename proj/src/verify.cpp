#include "gbcorr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gbcorr/correlation.hpp"
#include "gbcorr/fit.hpp"
#include "gbcorr/parallel.hpp"

namespace gbcorr {

bool SuiteResult::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const BoundCheck& b) { return b.pass; });
}

std::vector<std::string> SuiteResult::failing() const
{
    std::vector<std::string> out;
    for (const auto& b : rows)
        if (!b.pass) {
            std::string n = b.name;
            if (b.k_F > 0.0) n += "@k_F=" + std::to_string(b.k_F).substr(0, std::to_string(b.k_F).find('.') + 3);
            out.push_back(n);
        }
    return out;
}

namespace {

BoundCheck row(const std::string& name, const VerifyOptions& opt, double kF, double lhs, double rhs, bool pass,
               std::string context = {})
{
    BoundCheck b;
    b.name = name;
    b.k_F = kF;
    b.beta = opt.beta;
    b.epsilon = opt.epsilon;
    b.lhs = lhs;
    b.rhs_envelope = rhs;
    b.ratio = bound_ratio(lhs, rhs);
    b.pass = pass;
    b.context = std::move(context);
    return b;
}

// defect below tolerance
BoundCheck tol_row(const std::string& name, const VerifyOptions& opt, double kF, double defect, double tol,
                   std::string context = {})
{
    return row(name, opt, kF, defect, tol, std::isfinite(defect) && defect <= tol, std::move(context));
}

// finite, nonnegative ratio against an envelope
BoundCheck finite_row(const std::string& name, const VerifyOptions& opt, double kF, double lhs, double rhs,
                      std::string context = {})
{
    auto b = row(name, opt, kF, lhs, rhs, true, std::move(context));
    b.pass = std::isfinite(b.ratio);
    return b;
}

// divergence across the sweep fails; needs four positive ratios
void add_trends(std::vector<BoundCheck>& rows, const VerifyOptions& opt, const std::vector<std::string>& names)
{
    for (const auto& n : names) {
        std::vector<double> x, y;
        for (const auto& b : rows)
            if (b.name == n && b.ratio > 0.0 && std::isfinite(b.ratio)) {
                x.push_back(b.k_F);
                y.push_back(b.ratio);
            }
        if (x.size() < 4) continue;
        const double slope = loglog_slope(x, y);
        rows.push_back(row("trend:" + n, opt, 0.0, slope, opt.trend_limit, slope <= opt.trend_limit,
                           "log-log slope of the ratio against k_F"));
    }
}

double max_abs(const MatrixX<double>& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

// ---------------------------------------------------------------- one-body

RankOneReport rank_one_instance(const VectorX<double>& h, const VectorX<double>& v, double quad_tol)
{
    RankOneReport r;
    const auto n = h.size();
    const auto eig = e_roots(h, v, EMethod::eigen);
    const auto integral = e_roots(h, v, EMethod::rank_one_integral, quad_tol);
    r.fourth_root_error = std::max({max_abs(eig.E - integral.E), max_abs(eig.E_half - integral.E_half),
                                    max_abs(eig.E_inv_half - integral.E_inv_half)});
    const double X = v.cwiseProduct(v).cwiseQuotient(h).sum();
    const double shrink = 1.0 / (1.0 + 2.0 * X);
    const VectorX<double> sh = h.array().sqrt().matrix();
    const auto core = one_body_core<double>(h, v, v);
    r.sandwich_violation = -INFINITY;
    r.cs_violation = -INFINITY;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double vv = v(i) * v(j), den = h(i) + h(j);
            const double B1 = 2.0 * sh(i) * sh(j) / (sh(i) + sh(j)) * vv / den;
            const double B2 = 2.0 / (sh(i) + sh(j)) * vv / den;
            const double d1 = eig.E_half(i, j) - (i == j ? sh(i) : 0.0);
            const double d2 = (i == j ? 1.0 / sh(i) : 0.0) - eig.E_inv_half(i, j);
            r.sandwich_violation = std::max({r.sandwich_violation, shrink * B1 - d1, d1 - B1, shrink * B2 - d2, d2 - B2});
            const double b = vv / den;
            const double c = core.C(i, j) - (i == j ? 1.0 : 0.0), s = core.S(i, j);
            r.cs_violation = std::max({r.cs_violation, std::abs(c) - b, std::abs(s) - b, shrink * b - s,
                                       std::abs(s - b) - 2.0 * X * b});
        }
    return r;
}

ModeIdentityReport mode_identities(const ModeOperators<double>& m)
{
    ModeIdentityReport r;
    const Eigen::Index n = m.dim();
    if (n == 0) return r;
    const VectorX<double>& h = m.h_diag;
    const VectorX<double> sh = h.array().sqrt().matrix();
    const VectorX<double> u = sh.cwiseProduct(m.v);
    MatrixX<double> target = 2.0 * u * u.transpose();
    target.diagonal() += h.cwiseProduct(h);
    const MatrixX<double> E2 = m.E * m.E;
    r.e_squared = max_abs(E2 - target) / std::max(max_abs(E2), 1e-300);

    Eigen::SelfAdjointEigenSolver<MatrixX<double>> es(MatrixX<double>(m.E - MatrixX<double>(h.asDiagonal())),
                                                      Eigen::EigenvaluesOnly);
    r.e_minus_h = std::max(0.0, -es.eigenvalues().minCoeff()) / std::max(max_abs(m.E), 1e-300);

    const MatrixX<double> I = MatrixX<double>::Identity(n, n);
    const MatrixX<double> cms = sh.asDiagonal() * m.E_inv_half;
    const MatrixX<double> cps = sh.cwiseInverse().asDiagonal() * m.E_half;
    r.c_s_roots = std::max(max_abs(m.C - m.S - cms), max_abs(m.C + m.S - cps));
    r.c_s_inverse = max_abs((m.C - m.S) * (m.C + m.S).transpose() - I);

    const MatrixX<double> P = m.v * m.v.transpose();
    MatrixX<double> hP = P;
    hP.diagonal() += h;
    const MatrixX<double> rec1 = m.C * m.E * m.C.transpose() + m.S * m.E * m.S.transpose();
    const MatrixX<double> rec2 = m.C * m.E * m.S.transpose() + m.S * m.E * m.C.transpose();
    r.reconstruction = std::max(max_abs(rec1 - hP), max_abs(rec2 - P)) / std::max(max_abs(hP), 1e-300);

    const double t = trace_term(m);
    const double floor = -static_cast<double>(n) * m.g;
    r.trace_range = std::max({0.0, t, floor - t});
    if (floor < 0.0) r.trace_range /= -floor;
    r.trace_binned = std::abs(t - trace_term_binned(spectral_bins(m.lune), m.g)) / (1.0 + std::abs(t));

    const double X = m.v_h_inv_v;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double b = m.g / (h(i) + h(j));
            const double c = m.C(i, j) - (i == j ? 1.0 : 0.0), s = m.S(i, j);
            const double worst = std::max({std::abs(c) - b, std::abs(s) - b, b / (1.0 + 2.0 * X) - s,
                                           std::abs(s - b) - 2.0 * X * b});
            r.element_bounds = std::max(r.element_bounds, b > 0.0 ? worst / b : worst);
        }
    return r;
}

SuiteResult verify_onebody(const VerifyOptions& opt)
{
    SuiteResult res;
    res.suite = "onebody";
    constexpr std::int64_t dense_limit = 300;  // lune size for dense identities
    constexpr std::int64_t integral_limit = 40;  // lune size for the integral E path
    for (double kF : opt.kf_list) {
        const FermiRadius r(kF);
        const auto ball = fermi_ball(r);
        const auto orb = orbits(opt.orbit_factor * kF);
        struct Out {
            ModeIdentityReport id;
            double e_dual = 0.0, symmetry = 0.0, eta = 0.0, eta_ratio = 0.0;
            bool dense = false;
        };
        std::vector<Out> outs(orb.size());
        parallel_for(orb.size(), opt.threads, [&](std::size_t i) {
            const auto& k = orb.representatives[i];
            Lune L = lune(r, ball, k);
            if (L.empty() || static_cast<std::int64_t>(L.size()) > dense_limit) return;
            const double g = mode_coupling(kF, opt.beta, opt.model, k);
            const auto m = build_mode_from_lune<double>(std::move(L), g, true);
            auto& o = outs[i];
            o.dense = true;
            o.id = mode_identities(m);
            if (m.dim() <= integral_limit && kF <= 5.0 && g > 0.0)
                o.e_dual = max_abs(m.E - e_matrix(m, EMethod::rank_one_integral));
            if (m.dim() <= 120) {
                const auto mm = build_mode<double>(kF, opt.beta, opt.model, -k, false);
                for (std::size_t p = 0; p < m.lune.size(); ++p)
                    for (std::size_t q = 0; q < m.lune.size(); ++q) {
                        const auto ip = std::lower_bound(mm.lune.points.begin(), mm.lune.points.end(),
                                                         -m.lune.points[p], canonical_less) - mm.lune.points.begin();
                        const auto iq = std::lower_bound(mm.lune.points.begin(), mm.lune.points.end(),
                                                         -m.lune.points[q], canonical_less) - mm.lune.points.begin();
                        o.symmetry = std::max(o.symmetry, std::abs(m.S(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) - mm.S(ip, iq)));
                    }
            }
            const auto ee = eta_e_eta(m);
            o.eta = std::abs(ee.direct - ee.closed_form) / std::max(std::abs(ee.closed_form), 1e-300);
            o.eta_ratio = g > 0.0 ? 2.0 * ee.direct / g : 0.0;
        });
        ModeIdentityReport worst;
        double e_dual = 0.0, sym = 0.0, eta = 0.0, eta_ratio = 0.0;
        std::size_t modes = 0;
        for (const auto& o : outs) {
            if (!o.dense) continue;
            ++modes;
            worst.e_squared = std::max(worst.e_squared, o.id.e_squared);
            worst.e_minus_h = std::max(worst.e_minus_h, o.id.e_minus_h);
            worst.c_s_roots = std::max(worst.c_s_roots, o.id.c_s_roots);
            worst.c_s_inverse = std::max(worst.c_s_inverse, o.id.c_s_inverse);
            worst.reconstruction = std::max(worst.reconstruction, o.id.reconstruction);
            worst.trace_range = std::max(worst.trace_range, o.id.trace_range);
            worst.trace_binned = std::max(worst.trace_binned, o.id.trace_binned);
            worst.element_bounds = std::max(worst.element_bounds, o.id.element_bounds);
            e_dual = std::max(e_dual, o.e_dual);
            sym = std::max(sym, o.symmetry);
            eta = std::max(eta, o.eta);
            eta_ratio = std::max(eta_ratio, o.eta_ratio);
        }
        const std::string ctx = std::to_string(modes) + " modes";
        auto& R = res.rows;
        R.push_back(tol_row("e_squared", opt, kF, worst.e_squared, 1e-9, ctx));
        R.push_back(tol_row("e_dominates_h", opt, kF, worst.e_minus_h, 1e-12, ctx));
        R.push_back(tol_row("e_dual_path", opt, kF, e_dual, 1e-6, ctx));
        R.push_back(tol_row("c_s_roots", opt, kF, worst.c_s_roots, 1e-8, ctx));
        R.push_back(tol_row("c_s_inverse", opt, kF, worst.c_s_inverse, 1e-8, ctx));
        R.push_back(tol_row("c_s_reconstruction", opt, kF, worst.reconstruction, 1e-8, ctx));
        R.push_back(tol_row("minus_k_symmetry", opt, kF, sym, 1e-12, ctx));
        R.push_back(tol_row("trace_range", opt, kF, worst.trace_range, 1e-12, ctx));
        R.push_back(tol_row("trace_binned", opt, kF, worst.trace_binned, 1e-10, ctx));
        R.push_back(tol_row("cs_entry_bounds", opt, kF, worst.element_bounds, 1e-9, ctx));
        R.push_back(tol_row("eta_closed_form", opt, kF, eta, 1e-9, ctx));
        R.push_back(row("eta_factor_below_one", opt, kF, eta_ratio, 1.0, eta_ratio < 1.0, ctx));
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ua(0.1, 10.0), uv(0.05, 1.5);
    std::uniform_int_distribution<int> udim(1, 20);
    double fr = 0.0, sw = -INFINITY, cs = -INFINITY;
    for (int t = 0; t < opt.instances; ++t) {
        const int n = udim(rng);
        VectorX<double> h(n), v(n);
        for (int i = 0; i < n; ++i) h(i) = ua(rng);
        for (int i = 0; i < n; ++i) v(i) = uv(rng);
        const auto rep = rank_one_instance(h, v);
        fr = std::max(fr, rep.fourth_root_error);
        sw = std::max(sw, rep.sandwich_violation);
        cs = std::max(cs, rep.cs_violation);
    }
    const std::string ctx = std::to_string(opt.instances) + " random instances";
    res.rows.push_back(tol_row("fourth_root_vs_eigen", opt, 0.0, fr, 1e-6, ctx));
    res.rows.push_back(row("sandwich_bounds", opt, 0.0, sw, 1e-12, sw <= 1e-12, ctx));
    res.rows.push_back(row("cs_bounds_random", opt, 0.0, cs, 1e-12, cs <= 1e-12, ctx));
    return res;
}

// ---------------------------------------------------------------- scalar bounds

SuiteResult verify_bounds(const VerifyOptions& opt)
{
    SuiteResult res;
    res.suite = "bounds";
    auto& R = res.rows;
    const double kmax = *std::max_element(opt.kf_list.begin(), opt.kf_list.end());
    {
        const auto v = validate(opt.model, std::max(16.0, 4.0 * kmax));
        R.push_back(row("potential_assumptions", opt, 0.0, v.empirical_cv, opt.model.declared_cv, v.valid, v.message));
    }
    {
        // r3(n) against n^{1/2 + eps}, n <= 1e4
        const auto t = r3_table(10000);
        std::vector<double> x, y;
        for (std::size_t n = 1; n < t.size(); ++n)
            if (t[n] > 0) {
                x.push_back(static_cast<double>(n));
                y.push_back(static_cast<double>(t[n]));
            }
        const double slope = loglog_slope(x, y);
        R.push_back(row("r3_growth_exponent", opt, 0.0, slope, 0.75, slope <= 0.75, "n <= 10000"));
    }
    for (double kF : opt.kf_list) {
        const FermiRadius r(kF);
        const auto ball = fermi_ball(r);
        const double z = zeta(r);
        // gap of ||p|^2 - zeta| over the admissible set
        double gap = INFINITY;
        for (std::int64_t n = 0; n <= r.four_kf_sq(); ++n)
            if (r3(n) > 0) gap = std::min(gap, std::abs(static_cast<double>(n) - z));
        R.push_back(row("kinetic_gap", opt, kF, 0.5, gap, gap >= 0.5, "min ||p|^2 - zeta| over |p| <= 2 k_F"));
        const double env = std::pow(kF, 1.0 + opt.epsilon);
        R.push_back(finite_row("kinetic_sum_ball", opt, kF, kinetic_sum_ball(kF, 2.0 * kF), env, "A = B(0, 2 k_F)"));
        R.push_back(finite_row("kinetic_sum_fermi_ball", opt, kF, kinetic_sum_fermi_ball(kF), env, "A = B_F"));

        const auto orb = orbits(opt.orbit_factor * kF);
        struct Out {
            LuneStats st;
            ElementRatios el;
            VarphiPsiNorms vp;
        };
        std::vector<Out> outs(orb.size());
        parallel_for(orb.size(), opt.threads, [&](std::size_t i) {
            const auto& k = orb.representatives[i];
            const Lune L = lune(r, ball, k);
            auto bins = spectral_bins(L);
            auto& o = outs[i];
            o.st = lune_stats(r, bins, k);
            const double vk = opt.model.of_norm(k.norm_sq());
            const auto bm = build_binned_mode(k, std::move(bins), mode_coupling(kF, opt.beta, opt.model, k));
            o.el = element_ratios(bm, kF, opt.beta, vk);
            o.vp = varphi_psi_norms(bm, L, kF, opt.beta, vk);
        });
        double inv = 0, size = 0, s = 0, c = 0, sr = 0, phi = 0, psi = 0, sphi = 0, spsi = 0;
        for (const auto& o : outs) {
            inv = std::max(inv, o.st.sum_inv_lambda);
            size = std::max(size, o.st.ratio_size);
            s = std::max(s, o.el.s);
            c = std::max(c, o.el.c);
            sr = std::max(sr, o.el.s_refined);
            phi = std::max(phi, o.vp.ratio(o.vp.max_phi));
            psi = std::max(psi, o.vp.ratio(o.vp.max_psi));
            sphi = std::max(sphi, o.vp.ratio(o.vp.sum_max_phi));
            spsi = std::max(spsi, o.vp.ratio(o.vp.sum_max_psi));
        }
        const std::string ctx = std::to_string(orb.size()) + " orbits";
        R.push_back(finite_row("lune_inverse_sum", opt, kF, inv, kF, ctx));
        R.push_back(finite_row("lune_size", opt, kF, size, 1.0, ctx));
        R.push_back(finite_row("one_body_S", opt, kF, s, 1.0, ctx));
        R.push_back(finite_row("one_body_C", opt, kF, c, 1.0, ctx));
        R.push_back(finite_row("one_body_S_refined", opt, kF, sr, 1.0, ctx));
        R.push_back(finite_row("varphi_norm", opt, kF, phi, 1.0, ctx));
        R.push_back(finite_row("psi_norm", opt, kF, psi, 1.0, ctx));
        R.push_back(finite_row("varphi_sum", opt, kF, sphi, kF * kF, ctx));
        R.push_back(finite_row("psi_sum", opt, kF, spsi, kF * kF, ctx));

        // lunes beyond 2 k_F are the whole ball
        {
            std::int64_t bad = 0, tested = 0;
            const auto n_lo = r.four_kf_sq() + 1, n_hi = r.four_kf_sq() + 4 * r.floor_kf() + 8;
            for (const auto& k : orbits_by_norm(n_hi).representatives) {
                if (k.norm_sq() < n_lo) continue;
                ++tested;
                if (lune(r, ball, k).size() != ball.N) ++bad;
            }
            R.push_back(row("lune_saturation", opt, kF, static_cast<double>(bad), 0.0, bad == 0,
                            std::to_string(tested) + " orbits beyond 2 k_F"));
        }
        {
            const auto le = bos_lower_envelope(kF, opt.beta, opt.model, 2.0 * kF, opt.epsilon, 1e-9, opt.threads);
            auto b = row("bos_lower_chain", opt, kF, le.stats_bound, std::pow(kF, 3.0 - 2.0 * opt.beta + opt.epsilon),
                         le.chain_holds, "doubled bos <= pair sum <= lune statistics, |k| <= 2 k_F");
            R.push_back(b);
        }
        {
            const auto eb = error_budget(kF, opt.beta, opt.model, opt.epsilon);
            const double env = eb.fermi_state_envelope();
            R.push_back(row("error_budget_envelope", opt, kF, env, eb.final_coefficient * kF,
                            std::isfinite(env) && env >= 0.0, "Fermi-state envelope against k_F^{5/6+eps}"));
        }
    }
    add_trends(R, opt,
               {"kinetic_sum_ball", "kinetic_sum_fermi_ball", "lune_inverse_sum", "lune_size", "one_body_S",
                "one_body_C", "one_body_S_refined", "varphi_norm", "psi_norm", "varphi_sum", "psi_sum",
                "bos_lower_chain"});
    return res;
}

}  // namespace gbcorr
