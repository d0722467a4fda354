#include "gbcorr/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gbcorr/parallel.hpp"
#include "gbcorr/quadrature.hpp"
#include "gbcorr/summation.hpp"

namespace gbcorr {

namespace {

constexpr double pi = std::numbers::pi;
// exact lattice sums run out to this |k|^2
constexpr std::int64_t exact_norm_cap = 4096;

double shell_integral(const std::function<double(double)>& f, double a, double b)
{
    if (!(b > a)) return 0.0;
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-300;
    auto shell = [&](double r) { return 4.0 * pi * r * r * f(r); };
    if (!std::isfinite(b) || b >= 1e299) return integrate_to_infinity(shell, a, opt).value;
    // geometric breakpoints keep slowly decaying integrands resolved
    std::vector<double> bp{a};
    for (double x = 2.0 * a; x < b; x *= 2.0) bp.push_back(x);
    bp.push_back(b);
    return integrate(shell, bp, opt).value;
}

// radius of the ball whose volume equals the number of lattice points with |k|^2 <= n
double effective_radius(const std::vector<std::int64_t>& r3t, std::int64_t n)
{
    double count = 0.0;
    for (std::int64_t m = 0; m <= n; ++m) count += static_cast<double>(r3t[static_cast<std::size_t>(m)]);
    return std::cbrt(3.0 * count / (4.0 * pi));
}

const std::vector<std::int64_t>& cap_table()
{
    static const std::vector<std::int64_t> t = r3_table(exact_norm_cap);
    return t;
}

double shell_sum(const std::function<double(double)>& f, std::int64_t n_lo, std::int64_t n_hi, double support)
{
    // sum over n_lo < |k|^2 <= n_hi
    const auto& t = cap_table();
    NeumaierSum s;
    for (std::int64_t n = std::max<std::int64_t>(n_lo + 1, 1); n <= n_hi; ++n) {
        const auto c = t[static_cast<std::size_t>(n)];
        if (!c) continue;
        const double r = std::sqrt(static_cast<double>(n));
        if (r > support) break;
        s.add(static_cast<double>(c) * f(r));
    }
    return s.value();
}

}  // namespace

double bound_ratio(double lhs, double rhs)
{
    if (rhs > 0.0) return lhs / rhs;
    if (lhs == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

std::int64_t kinetic_set_limit(const FermiRadius& r)
{
    // |p|^2 <= 4 k_F^2
    const auto t = r3_table(r.four_kf_sq());
    std::int64_t c = 0;
    for (auto x : t) c += x;
    return c;
}

double kinetic_sum(const FermiRadius& r, const std::vector<LatticeVec>& A)
{
    if (static_cast<std::int64_t>(A.size()) > kinetic_set_limit(r))
        throw ValidationError("kinetic_sum: set larger than |B(0, 2 k_F)|");
    const double z = zeta(r);
    NeumaierSum s;
    for (const auto& p : A) s.add(1.0 / std::abs(static_cast<double>(p.norm_sq()) - z));
    return s.value();
}

double kinetic_sum_fermi_ball(double kF)
{
    const FermiRadius r(kF);
    return kinetic_sum(r, fermi_ball(r).points);
}

double kinetic_sum_lune(double kF, const LatticeVec& k)
{
    const FermiRadius r(kF);
    return kinetic_sum(r, lune(r, fermi_ball(r), k).points);
}

double kinetic_sum_ball(double kF, double R)
{
    const FermiRadius r(kF);
    if (!(R >= 0.0)) throw ValidationError("kinetic_sum_ball: radius must be nonnegative");
    const auto nmax = max_norm_within(R);
    if (4 * nmax > 4 * r.four_kf_sq()) throw ValidationError("kinetic_sum: set larger than |B(0, 2 k_F)|");
    const auto t = r3_table(nmax);
    const double z = zeta(r);
    NeumaierSum s;
    for (std::int64_t n = 0; n <= nmax; ++n) {
        const auto c = t[static_cast<std::size_t>(n)];
        if (c) s.add(static_cast<double>(c) / std::abs(static_cast<double>(n) - z));
    }
    return s.value();
}

LuneStats lune_stats(const FermiRadius& r, const SpectralBins& b, const LatticeVec& k)
{
    LuneStats st;
    st.size = b.total;
    NeumaierSum s;
    for (std::size_t a = 0; a < b.size(); ++a) s.add(b.count[a] / b.mu[a]);
    st.sum_inv_lambda = s.value();
    const double kf = r.kf();
    st.ratio_inv = st.sum_inv_lambda / kf;
    const double kn = std::sqrt(static_cast<double>(k.norm_sq()));
    st.ratio_size = static_cast<double>(st.size) / (kf * kf * std::min(kn, kf));
    return st;
}

LuneStats lune_stats(double kF, const LatticeVec& k)
{
    const FermiRadius r(kF);
    return lune_stats(r, lune_bins(r, fermi_ball(r), k), k);
}

VarphiPsiNorms varphi_psi_norms(const ModeOperators<double>& m, double kF, double beta, double vk)
{
    VarphiPsiNorms out;
    out.scale = std::pow(kF, 1.0 - 2.0 * beta) * vk * vk;
    const Eigen::Index n = m.dim();
    if (n == 0) return out;
    const double kf2 = kF * kF;
    const MatrixX<double> Cm = m.C - MatrixX<double>::Identity(n, n);
    for (int conv = 0; conv < 2; ++conv) {
        double mphi = 0.0, sphi = 0.0, mpsi = 0.0, spsi = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& p = m.lune.points[static_cast<std::size_t>(j)];
            const LatticeVec base = conv == 0 ? p : p - m.k;
            const double w = std::abs(static_cast<double>(base.norm_sq()) - kf2);
            const double nphi = w * Cm.col(j).squaredNorm();
            const double npsi = w * m.S.col(j).squaredNorm();
            mphi = std::max(mphi, nphi);
            mpsi = std::max(mpsi, npsi);
            sphi += w * Cm.col(j).cwiseAbs2().maxCoeff();
            spsi += w * m.S.col(j).cwiseAbs2().maxCoeff();
        }
        out.max_phi = std::max(out.max_phi, mphi);
        out.sum_max_phi = std::max(out.sum_max_phi, sphi);
        out.max_psi = std::max(out.max_psi, mpsi);
        out.sum_max_psi = std::max(out.sum_max_psi, spsi);
    }
    return out;
}

VarphiPsiNorms varphi_psi_norms(double kF, double beta, const PotentialModel& model, const LatticeVec& k)
{
    const auto m = build_mode<double>(kF, beta, model, k, false);
    return varphi_psi_norms(m, kF, beta, v_hat(model, k));
}

VarphiPsiNorms varphi_psi_norms(const BinnedMode& bm, const Lune& L, double kF, double beta, double vk)
{
    VarphiPsiNorms out;
    out.scale = std::pow(kF, 1.0 - 2.0 * beta) * vk * vk;
    const auto B = static_cast<Eigen::Index>(bm.bins.size());
    if (B == 0) return out;
    // every entry of C - 1 and S in bins (a, b) equals the reduced entry over sqrt(c_a c_b)
    std::vector<double> col_c(static_cast<std::size_t>(B)), col_s(col_c), max_c(col_c), max_s(col_c);
    const MatrixX<double> Cm = bm.core.C - MatrixX<double>::Identity(B, B);
    for (Eigen::Index b = 0; b < B; ++b) {
        const double cb = bm.bins.count[static_cast<std::size_t>(b)];
        for (Eigen::Index a = 0; a < B; ++a) {
            const double ca = bm.bins.count[static_cast<std::size_t>(a)];
            const double c2 = Cm(a, b) * Cm(a, b), s2 = bm.core.S(a, b) * bm.core.S(a, b);
            col_c[static_cast<std::size_t>(b)] += c2 / cb;
            col_s[static_cast<std::size_t>(b)] += s2 / cb;
            max_c[static_cast<std::size_t>(b)] = std::max(max_c[static_cast<std::size_t>(b)], c2 / (ca * cb));
            max_s[static_cast<std::size_t>(b)] = std::max(max_s[static_cast<std::size_t>(b)], s2 / (ca * cb));
        }
    }
    const double kf2 = kF * kF;
    for (int conv = 0; conv < 2; ++conv) {
        double mphi = 0.0, sphi = 0.0, mpsi = 0.0, spsi = 0.0;
        for (std::size_t j = 0; j < L.size(); ++j) {
            const auto b = static_cast<std::size_t>(bm.bins.index_of(L.two_lambdas[j]));
            const LatticeVec base = conv == 0 ? L.points[j] : L.points[j] - L.k;
            const double w = std::abs(static_cast<double>(base.norm_sq()) - kf2);
            mphi = std::max(mphi, w * col_c[b]);
            mpsi = std::max(mpsi, w * col_s[b]);
            sphi += w * max_c[b];
            spsi += w * max_s[b];
        }
        out.max_phi = std::max(out.max_phi, mphi);
        out.sum_max_phi = std::max(out.sum_max_phi, sphi);
        out.max_psi = std::max(out.max_psi, mpsi);
        out.sum_max_psi = std::max(out.sum_max_psi, spsi);
    }
    return out;
}

ElementRatios element_ratios(const BinnedMode& bm, double kF, double beta, double vk)
{
    ElementRatios out;
    const auto B = static_cast<Eigen::Index>(bm.bins.size());
    if (B == 0 || vk == 0.0) return out;
    const double lin = vk * std::pow(kF, -beta);
    const double quad = vk * vk * std::pow(kF, 1.0 - 2.0 * beta);
    const auto& S = bm.core.S;
    const auto& C = bm.core.C;
    for (Eigen::Index a = 0; a < B; ++a) {
        const double ca = bm.bins.count[static_cast<std::size_t>(a)], ma = bm.bins.mu[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < B; ++b) {
            const double cb = bm.bins.count[static_cast<std::size_t>(b)], mb = bm.bins.mu[static_cast<std::size_t>(b)];
            const double nrm = 1.0 / std::sqrt(ca * cb);
            const double sum = ma + mb;
            const double s = S(a, b) * nrm;
            const double c = (C(a, b) - (a == b ? 1.0 : 0.0)) * nrm;
            out.s = std::max(out.s, std::abs(s) * sum / lin);
            out.c = std::max(out.c, std::abs(c) * sum / lin);
            out.s_refined = std::max(out.s_refined, std::abs(s - bm.g / sum) * sum / quad);
        }
    }
    return out;
}

ElementRatios element_ratios(double kF, double beta, const PotentialModel& model, const LatticeVec& k)
{
    const FermiRadius r(kF);
    const auto bm = build_binned_mode(k, lune_bins(r, fermi_ball(r), k), mode_coupling(kF, beta, model, k));
    return element_ratios(bm, kF, beta, v_hat(model, k));
}

double radial_sum_within(const std::function<double(double)>& f, double R, double support)
{
    if (!(R > 0.0)) return 0.0;
    const auto& t = cap_table();
    const double R2 = R * R;
    if (R2 <= static_cast<double>(exact_norm_cap)) return shell_sum(f, 0, max_norm_within(R), support);
    const double exact = shell_sum(f, 0, exact_norm_cap, support);
    const double from = effective_radius(t, exact_norm_cap);
    return exact + shell_integral(f, from, std::min(R, support));
}

double radial_sum_beyond(const std::function<double(double)>& f, double R, double support)
{
    const auto& t = cap_table();
    const double R2 = std::max(R, 0.0) * std::max(R, 0.0);
    if (R2 < static_cast<double>(exact_norm_cap)) {
        const double exact = shell_sum(f, max_norm_within(std::max(R, 0.0)), exact_norm_cap, support);
        const double from = effective_radius(t, exact_norm_cap);
        return exact + (support > from ? shell_integral(f, from, support) : 0.0);
    }
    return support > R ? shell_integral(f, R, support) : 0.0;
}

double ErrorBudget::fermi_state_envelope() const
{
    // H' = 0 on the Fermi state, so only the k_F parts survive
    return (envelope_B + envelope_C) * k_F + envelope_B_const;
}

ErrorBudget error_budget(double kF, double beta, const PotentialModel& model, double epsilon, double radius_S,
                         double radius_S_prime)
{
    if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in (0,1]");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    const FermiRadius r(kF);
    ErrorBudget eb;
    eb.k_F = kF;
    eb.beta = beta;
    eb.epsilon = epsilon;
    eb.radius_S = radius_S > 0.0 ? radius_S : std::cbrt(kF);
    eb.radius_S_prime = radius_S_prime > 0.0 ? radius_S_prime : std::pow(kF, 2.5);
    const double sup = model.support_radius();
    auto V = [&](double x) { return model.radial(x); };

    const double v2_out = radial_sum_beyond([&](double x) { return V(x) * V(x); }, eb.radius_S, sup);
    eb.sqrt_v2_outside_S = std::sqrt(std::max(v2_out, 0.0));
    eb.v_sum_S_scaled = radial_sum_within(V, eb.radius_S, sup) / std::sqrt(kF);
    eb.v3_sum = radial_sum_beyond([&](double x) { return V(x) * V(x) * V(x); }, 0.0, sup);
    eb.sqrt_v2_min = std::sqrt(radial_sum_beyond([&](double x) { return V(x) * V(x) * std::min(x, kF); }, 0.0, sup));
    eb.v_over_k2_outside = radial_sum_beyond([&](double x) { return V(x) / (x * x); }, eb.radius_S_prime, sup);
    eb.sqrt_v2_k_outside = std::sqrt(
        radial_sum_beyond([&](double x) { return V(x) * V(x) * std::pow(x, -(1.0 - epsilon)); }, eb.radius_S_prime, sup));
    eb.v_sum_S_prime_scaled = radial_sum_within(V, eb.radius_S_prime, sup) / (kF * kF);
    eb.v_sup_outside = model.of_norm(inf_outside_norm(r));

    const double lead = std::pow(kF, 2.0 * (1.0 - beta) + epsilon);
    eb.envelope_B = lead * (eb.sqrt_v2_outside_S + eb.v_sum_S_scaled) * eb.sqrt_v2_min;
    eb.envelope_B_const = std::pow(kF, 3.0 * (1.0 - beta)) * eb.v3_sum;
    eb.envelope_C = lead * eb.v_sum_S_scaled * (eb.sqrt_v2_min + eb.v_sum_S_scaled);
    const double v_sum_S = eb.v_sum_S_scaled * std::sqrt(kF);
    eb.envelope_S = std::pow(kF, -beta) / (2.0 * two_pi_cubed) *
                    (std::pow(kF, 1.0 + epsilon) * eb.sqrt_v2_outside_S + v_sum_S + eb.v_sup_outside +
                     eb.v_sum_S_prime_scaled + kF * kF * kF * (eb.v_over_k2_outside + eb.sqrt_v2_k_outside));
    eb.final_exponent = -1.0 / 6.0 + 2.0 * (1.0 - beta) + epsilon;
    eb.final_coefficient = std::pow(kF, eb.final_exponent);
    return eb;
}

BosLowerEnvelope bos_lower_envelope(double kF, double beta, const PotentialModel& model, double Kmax,
                                    double epsilon, double rel_tol, int threads)
{
    BosLowerEnvelope out;
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    const auto orb = orbits(Kmax);
    const double kfb = std::pow(kF, -beta);
    const double pref = kfb * kfb / (two_pi_cubed * two_pi_cubed);
    struct Row {
        double bos = 0.0, pair = 0.0, stats = 0.0;
        bool ok = true;
    };
    std::vector<Row> rows(orb.size());
    parallel_for(orb.size(), threads, [&](std::size_t i) {
        const auto& k = orb.representatives[i];
        const double vk = model.of_norm(k.norm_sq());
        if (vk == 0.0) return;
        const auto bins = lune_bins(r, ball, k);
        const auto st = lune_stats(r, bins, k);
        auto& row = rows[i];
        // doubled potential: F-argument weight 4g
        row.bos = -bos_term(bins, 2.0 * mode_coupling_norm(kF, beta, model, k.norm_sq()), rel_tol).value;
        row.pair = pref * vk * vk * pair_inverse_sum(bins);
        row.stats = pref * vk * vk * static_cast<double>(st.size) * st.sum_inv_lambda;
        row.ok = row.bos <= row.pair * (1.0 + 1e-9) && row.pair <= row.stats * (1.0 + 1e-12);
    });
    NeumaierSum b, p, s;
    out.chain_holds = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto m = static_cast<double>(orb.multiplicities[i]);
        b.add(m * rows[i].bos);
        p.add(m * rows[i].pair);
        s.add(m * rows[i].stats);
        out.chain_holds = out.chain_holds && rows[i].ok;
    }
    out.doubled_bos = b.value();
    out.pair_bound = p.value();
    out.stats_bound = s.value();
    out.scaling_ratio = out.stats_bound / std::pow(kF, 3.0 - 2.0 * beta + epsilon);
    return out;
}

}  // namespace gbcorr
