#include "gbcorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbcorr/parallel.hpp"
#include "gbcorr/quadrature.hpp"
#include "gbcorr/summation.hpp"

namespace gbcorr {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double exchange_prefactor_base = 1.0 / (4.0 * two_pi_cubed * two_pi_cubed);
}  // namespace

double F(double x)
{
    if (std::abs(x) < 0.1) {
        // -x^2/2 + x^3/3 - ...
        double term = x * x, s = 0.0;
        for (int n = 2; n < 60; ++n) {
            const double c = ((n % 2) ? 1.0 : -1.0) * term / n;
            s += c;
            if (std::abs(c) <= 1e-18 * std::abs(s)) break;
            term *= x;
        }
        return s;
    }
    return std::log1p(x) - x;
}

double lindhard_sum(const Lune& L, double t)
{
    NeumaierSum s;
    const double t2 = t * t;
    for (double l : L.lambdas) s.add(l / (l * l + t2));
    return s.value();
}

double lindhard_sum(const SpectralBins& b, double t)
{
    NeumaierSum s;
    const double t2 = t * t;
    for (std::size_t a = 0; a < b.size(); ++a) s.add(b.count[a] * b.mu[a] / (b.mu[a] * b.mu[a] + t2));
    return s.value();
}

namespace {

// Kahan-compensated Lambda at up to 16 abscissae at once
void lindhard_batch(const std::vector<double>& cmu, const std::vector<double>& mu2, const double* t, double* out,
                    int n)
{
    alignas(64) double t2[16] = {}, acc[16] = {}, comp[16] = {};
    for (int j = 0; j < n; ++j) t2[j] = t[j] * t[j];
    const std::size_t B = cmu.size();
    for (std::size_t a = 0; a < B; ++a) {
        const double c = cmu[a], m = mu2[a];
#pragma GCC ivdep
        for (int j = 0; j < 16; ++j) {
            const double y = c / (m + t2[j]) - comp[j];
            const double s = acc[j] + y;
            comp[j] = (s - acc[j]) - y;
            acc[j] = s;
        }
    }
    for (int j = 0; j < n; ++j) out[j] = acc[j];
}

}  // namespace

BosTerm bos_term(const SpectralBins& b, double g, double rel_tol)
{
    BosTerm r;
    if (b.empty() || g == 0.0) return r;
    std::vector<double> cmu(b.size()), mu2(b.size());
    double S1 = 0.0, S3 = 0.0;
    for (std::size_t a = 0; a < b.size(); ++a) {
        cmu[a] = b.count[a] * b.mu[a];
        mu2[a] = b.mu[a] * b.mu[a];
        S1 += cmu[a];
        S3 += cmu[a] * mu2[a];
    }
    const double lmin = b.mu.front(), lmax = b.mu.back();
    const double T = 50.0 * lmax;
    std::vector<double> bp{0.0};
    for (double x = 0.25 * lmin; x < T; x *= 4.0) bp.push_back(x);
    bp.push_back(T);
    const double two_g = 2.0 * g;
    auto f = [&](const double* t, double* y, int n) {
        double lam[16];
        lindhard_batch(cmu, mu2, t, lam, n);
        for (int j = 0; j < n; ++j) y[j] = F(two_g * lam[j]);
    };
    QuadOptions opt;
    opt.abs_tol = 1e-300;
    opt.rel_tol = rel_tol;
    opt.max_intervals = 20000;
    const auto q = integrate_batched(f, bp, opt);
    const double T3 = T * T * T, T5 = T3 * T * T;
    const double tail = -two_g * two_g * S1 * S1 / (6.0 * T3) + two_g * two_g * S1 * S3 / (5.0 * T5) +
                        two_g * two_g * two_g * S1 * S1 * S1 / (15.0 * T5);
    r.tail = tail / pi;
    r.value = q.value / pi + r.tail;
    r.error = q.error / pi + std::abs(r.tail) * 1e-6;
    r.evaluations = q.evaluations;
    if (!q.converged) throw NumericalError("bos_term quadrature did not converge", r.value, r.error);
    return r;
}

BosTerm bos_term(double kF, double beta, const PotentialModel& model, const LatticeVec& k, double rel_tol)
{
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    return bos_term(lune_bins(r, ball, k), mode_coupling(kF, beta, model, k), rel_tol);
}

double continuum_tail(const std::function<double(double)>& f, double K, double support)
{
    if (support <= K) return 0.0;
    const auto nK = max_norm_within(K);
    const auto t = r3_table(nK);
    double count = 0.0;
    for (auto c : t) count += static_cast<double>(c);
    const double Reff = std::cbrt(3.0 * count / (4.0 * pi));
    auto shell = [&](double r) { return 4.0 * pi * r * r * f(r); };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-300;
    if (std::isfinite(support) && support < 1e299) {
        if (support <= Reff) return 0.0;
        return integrate(shell, Reff, support, opt).value;
    }
    return integrate_to_infinity(shell, Reff, opt).value;
}

double pair_inverse_sum(const SpectralBins& b)
{
    const std::size_t B = b.size();
    if (B == 0) return 0.0;
    if (B <= 96) {
        NeumaierSum s;
        for (std::size_t a = 0; a < B; ++a)
            for (std::size_t c = 0; c < B; ++c) s.add(b.count[a] * b.count[c] / (b.mu[a] + b.mu[c]));
        return s.value();
    }
    // (2/pi) int_0^inf Lambda(t)^2 dt
    std::vector<double> cmu(B), mu2(B);
    double S1 = 0.0, S3 = 0.0;
    for (std::size_t a = 0; a < B; ++a) {
        cmu[a] = b.count[a] * b.mu[a];
        mu2[a] = b.mu[a] * b.mu[a];
        S1 += cmu[a];
        S3 += cmu[a] * mu2[a];
    }
    const double T = 50.0 * b.mu.back();
    std::vector<double> bp{0.0};
    for (double x = 0.25 * b.mu.front(); x < T; x *= 4.0) bp.push_back(x);
    bp.push_back(T);
    auto f = [&](const double* t, double* y, int n) {
        double lam[16];
        lindhard_batch(cmu, mu2, t, lam, n);
        for (int j = 0; j < n; ++j) y[j] = lam[j] * lam[j];
    };
    QuadOptions opt;
    opt.abs_tol = 1e-300;
    opt.rel_tol = 1e-12;
    const auto q = integrate_batched(f, bp, opt);
    const double T3 = T * T * T, T5 = T3 * T * T;
    const double tail = S1 * S1 / (3.0 * T3) - 2.0 * S1 * S3 / (5.0 * T5);
    return 2.0 / pi * (q.value + tail);
}

double second_order_term(const SpectralBins& bins, double weight)
{
    if (weight == 0.0) return 0.0;
    return -weight * weight * exchange_prefactor_base * pair_inverse_sum(bins);
}

double second_order_tail(double kF, double beta, const PotentialModel& model, double Kmax)
{
    const double N = static_cast<double>(fermi_ball(kF).N);
    const double s = continuum_tail([&](double r) { return std::pow(model.radial(r), 2) / (r * r); }, Kmax,
                                    model.support_radius());
    return -exchange_prefactor_base * std::pow(kF, -2.0 * beta) * N * N * s;
}

double exchange_tail(double kF, double beta, const PotentialModel& model, double Kmax)
{
    return -second_order_tail(kF, beta, model, Kmax);
}

BosSum e_corr_bos(double kF, double beta, const PotentialModel& model, double Kmax, const BosOptions& opt)
{
    if (!(Kmax >= 1.0)) throw ValidationError("K_max must be >= 1");
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    const auto orb = orbits(Kmax);
    BosSum out;
    out.rows.resize(orb.size());
    const double kfb = std::pow(kF, -beta);
    parallel_for(orb.size(), opt.threads, [&](std::size_t i) {
        auto& row = out.rows[i];
        row.k = orb.representatives[i];
        row.multiplicity = orb.multiplicities[i];
        const auto bins = lune_bins(r, ball, row.k);
        row.lune_size = static_cast<std::size_t>(bins.total);
        const double vk = model.of_norm(row.k.norm_sq());
        const double g = vk * kfb / (2.0 * two_pi_cubed);
        try {
            const auto bt = bos_term(bins, g, opt.rel_tol);
            row.bos_term = bt.value;
            row.bos_error = bt.error;
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at k = (" + std::to_string(row.k.x) + "," +
                                     std::to_string(row.k.y) + "," + std::to_string(row.k.z) + ")",
                                 e.partial_value, e.error_estimate);
        }
        if (opt.with_trace) row.trace_term = trace_term_binned(bins, g);
        if (opt.with_second_order) row.second_order = second_order_term(bins, vk * kfb);
    });
    NeumaierSum v, t, s, e;
    for (const auto& row : out.rows) {
        const auto m = static_cast<double>(row.multiplicity);
        v.add(m * row.bos_term);
        t.add(m * row.trace_term);
        s.add(m * row.second_order);
        e.add(m * row.bos_error);
    }
    out.value = v.value();
    out.trace_value = opt.with_trace ? t.value() : 0.0;
    out.second_order = s.value();
    out.quad_error = e.value();
    out.tail_estimate = model.coupling == 0.0 ? 0.0 : second_order_tail(kF, beta, model, Kmax);
    return out;
}

double exchange_inner(const FermiRadius& r, const FermiBall& ball, const PotentialModel& model, const LatticeVec& k)
{
    const Lune L = lune(r, ball, k);
    const std::size_t n = L.size();
    if (n == 0 || model.coupling == 0.0) return 0.0;
    const double reach = std::sqrt(static_cast<double>(k.norm_sq())) + 2.0 * r.kf();
    const auto nmax = static_cast<std::int64_t>(std::ceil(reach * reach)) + 2;
    std::vector<double> vtab(static_cast<std::size_t>(nmax + 1), 0.0);
    for (std::int64_t m = 1; m <= nmax; ++m) vtab[static_cast<std::size_t>(m)] = model.of_norm(m);
    std::vector<std::int64_t> px(n), py(n), pz(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = L.points[i].x - k.x;
        py[i] = L.points[i].y - k.y;
        pz[i] = L.points[i].z - k.z;
    }
    NeumaierSum total;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = L.points[i];
        const double li = L.lambdas[i];
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int64_t lx = p.x + px[j], ly = p.y + py[j], lz = p.z + pz[j];
            const std::int64_t m = lx * lx + ly * ly + lz * lz;
            if (m == 0) throw NumericalError("exchange: p + q - k = 0 inside a lune");
            row += vtab[static_cast<std::size_t>(m)] / (li + L.lambdas[j]);
        }
        const LatticeVec d = p + p - k;
        if (d.is_zero()) throw NumericalError("exchange: p + q - k = 0 inside a lune");
        total.add(2.0 * row);
        total.add(vtab[static_cast<std::size_t>(d.norm_sq())] / (2.0 * li));
    }
    return total.value();
}

ExSum e_corr_ex(double kF, double beta, const PotentialModel& model, double Kmax, int threads)
{
    if (!(Kmax >= 1.0)) throw ValidationError("K_max must be >= 1");
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    const auto orb = orbits(Kmax);
    ExSum out;
    out.rows.resize(orb.size());
    const double pref = std::pow(kF, -2.0 * beta) * exchange_prefactor_base;
    parallel_for(orb.size(), threads, [&](std::size_t i) {
        auto& row = out.rows[i];
        row.k = orb.representatives[i];
        row.multiplicity = orb.multiplicities[i];
        const double vk = model.of_norm(row.k.norm_sq());
        row.lune_size = static_cast<std::size_t>(lune_bins(r, ball, row.k).total);
        row.ex_term = vk == 0.0 ? 0.0 : pref * vk * exchange_inner(r, ball, model, row.k);
    });
    NeumaierSum v;
    for (const auto& row : out.rows) v.add(static_cast<double>(row.multiplicity) * row.ex_term);
    out.value = v.value();
    out.tail_estimate = model.coupling == 0.0 ? 0.0 : exchange_tail(kF, beta, model, Kmax);
    return out;
}

double second_order(double kF, double beta, const PotentialModel& model, double Kmax, int threads)
{
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    const auto orb = orbits(Kmax);
    std::vector<double> terms(orb.size(), 0.0);
    const double kfb = std::pow(kF, -beta);
    parallel_for(orb.size(), threads, [&](std::size_t i) {
        const auto& k = orb.representatives[i];
        terms[i] = second_order_term(lune_bins(r, ball, k), model.of_norm(k.norm_sq()) * kfb);
    });
    NeumaierSum s;
    for (std::size_t i = 0; i < orb.size(); ++i) s.add(static_cast<double>(orb.multiplicities[i]) * terms[i]);
    return s.value();
}

EB6Result eb6_exchange(double kF, double beta, const PotentialModel& model, double Kmax, int threads)
{
    EB6Result out;
    const FermiRadius r(kF);
    const auto ball = fermi_ball(r);
    const auto korb = orbits(Kmax);
    const double reach = Kmax + 2.0 * r.kf();
    const auto lmax = max_norm_within(reach);
    const auto lorb = orbits_by_norm(lmax);
    const auto A = static_cast<std::int64_t>(std::sqrt(static_cast<double>(lmax))) + 1;
    auto slot = [A](const LatticeVec& rep) {
        return static_cast<std::size_t>(((-rep.x) * (A + 1) + (-rep.y)) * (A + 1) + (-rep.z));
    };
    std::vector<std::int32_t> where(static_cast<std::size_t>((A + 1) * (A + 1) * (A + 1)), -1);
    for (std::size_t i = 0; i < lorb.size(); ++i) where[slot(lorb.representatives[i])] = static_cast<std::int32_t>(i);
    std::vector<BinnedMode> modes(lorb.size());
    parallel_for(lorb.size(), threads, [&](std::size_t i) {
        const auto& l = lorb.representatives[i];
        modes[i] = build_binned_mode(l, lune_bins(r, ball, l), mode_coupling_norm(kF, beta, model, l.norm_sq()));
    });
    auto mode_of = [&](const LatticeVec& l) -> const BinnedMode& {
        const auto rep = orbit_representative(l);
        const auto idx = where[slot(rep)];
        if (idx < 0) throw NumericalError("eb6: shifted mode outside the prepared range");
        return modes[static_cast<std::size_t>(idx)];
    };

    out.rows.resize(korb.size());
    parallel_for(korb.size(), threads, [&](std::size_t i) {
        auto& row = out.rows[i];
        row.k = korb.representatives[i];
        row.multiplicity = korb.multiplicities[i];
        const Lune L = lune(r, ball, row.k);
        row.lune_size = L.size();
        const auto& mk = mode_of(row.k);
        if (L.empty() || mk.g == 0.0) return;
        const std::size_t n = L.size();
        std::vector<std::int64_t> bk(n);
        std::vector<double> ck(n);
        for (std::size_t a = 0; a < n; ++a) {
            bk[a] = mk.bins.index_of(L.two_lambdas[a]);
            ck[a] = mk.bins.count[static_cast<std::size_t>(bk[a])];
        }
        const auto& Sk = mk.core.S;
        NeumaierSum acc;
        for (std::size_t pi_ = 0; pi_ < n; ++pi_) {
            const auto& p = L.points[pi_];
            const double two_lp = static_cast<double>(L.two_lambdas[pi_]);
            double col = 0.0;
            for (std::size_t qi = 0; qi < n; ++qi) {
                const auto& q = L.points[qi];
                const LatticeVec l = p + q - row.k;
                const auto& ml = mode_of(l);
                // lambda_{l,q} and lambda_{l,p}
                const std::int64_t tlq = q.norm_sq() - (row.k - p).norm_sq();
                const std::int64_t tlp = p.norm_sq() - (row.k - q).norm_sq();
                const auto bq = ml.bins.index_of(tlq), bp = ml.bins.index_of(tlp);
                if (bq < 0 || bp < 0) throw NumericalError("eb6: lune membership mismatch for shifted mode");
                const double skqp = Sk(bk[qi], bk[pi_]) / std::sqrt(ck[qi] * ck[pi_]);
                const double slqp = ml.core.S(bq, bp) / std::sqrt(ml.bins.count[static_cast<std::size_t>(bq)] *
                                                                 ml.bins.count[static_cast<std::size_t>(bp)]);
                col += skqp * slqp;
            }
            acc.add(two_lp * col);
        }
        row.ex_term = acc.value();
    });
    NeumaierSum v;
    for (const auto& row : out.rows) v.add(static_cast<double>(row.multiplicity) * row.ex_term);
    out.value = v.value();
    out.e_ex = e_corr_ex(kF, beta, model, Kmax, threads).value;
    out.deviation = std::abs(out.value - out.e_ex);
    NeumaierSum v3;
    for (std::size_t i = 0; i < korb.size(); ++i)
        v3.add(static_cast<double>(korb.multiplicities[i]) * std::pow(model.of_norm(korb.representatives[i].norm_sq()), 3));
    v3.add(continuum_tail([&](double x) { return std::pow(model.radial(x), 3); }, Kmax, model.support_radius()));
    out.sum_v_cubed = v3.value();
    return out;
}

CorrelationReport compute_correlation(double kF, double beta, const PotentialModel& model,
                                      const CorrelationOptions& opt)
{
    CorrelationReport rep;
    rep.k_F = kF;
    rep.beta = beta;
    rep.model = model.descriptor();
    rep.K_max_bos = opt.kmax_factor_bos * kF;
    rep.K_max_ex = opt.kmax_factor_ex * kF;
    rep.beta_in_theorem_range = beta > 11.0 / 12.0;
    BosOptions bo;
    bo.rel_tol = opt.quad_rel_tol;
    bo.with_trace = opt.with_trace;
    bo.with_second_order = true;
    bo.threads = opt.threads;
    auto bos = e_corr_bos(kF, beta, model, std::max(1.0, rep.K_max_bos), bo);
    rep.e_bos_quadrature = bos.value;
    rep.e_bos_trace = bos.trace_value;
    rep.e_second_order = bos.second_order;
    rep.tail_estimate_bos = bos.tail_estimate;
    rep.quad_error = bos.quad_error;
    auto ex = e_corr_ex(kF, beta, model, std::max(1.0, rep.K_max_ex), opt.threads);
    rep.e_ex = ex.value;
    rep.tail_estimate_ex = ex.tail_estimate;
    if (opt.with_eb6) rep.e_b6 = eb6_exchange(kF, beta, model, std::max(1.0, rep.K_max_ex), opt.threads).value;
    rep.per_orbit = std::move(bos.rows);
    std::size_t j = 0;
    for (auto& row : rep.per_orbit) {
        while (j < ex.rows.size() && canonical_less(ex.rows[j].k, row.k)) ++j;
        if (j < ex.rows.size() && ex.rows[j].k == row.k) row.ex_term = ex.rows[j].ex_term;
    }
    return rep;
}

}  // namespace gbcorr
