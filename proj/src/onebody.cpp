#include "gbcorr/onebody.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "gbcorr/quadrature.hpp"
#include "gbcorr/summation.hpp"

namespace gbcorr {

double mode_coupling_norm(double kF, double beta, const PotentialModel& m, std::int64_t knorm)
{
    return m.of_norm(knorm) * std::pow(kF, -beta) / (2.0 * two_pi_cubed);
}

double mode_coupling(double kF, double beta, const PotentialModel& m, const LatticeVec& k)
{
    if (k.is_zero()) throw ValidationError("mode_coupling: k = 0");
    return mode_coupling_norm(kF, beta, m, k.norm_sq());
}

MatrixX<double> fourth_root_rank_one(const VectorX<double>& a, const VectorX<double>& w, bool plus_quarter,
                                     double abs_tol)
{
    const Eigen::Index n = a.size();
    if (w.size() != n) throw ValidationError("fourth_root_rank_one: size mismatch");
    if (n == 0) return {};
    if ((a.array() <= 0.0).any()) throw ValidationError("fourth_root_rank_one: diagonal must be positive");
    const double c = 2.0 * std::numbers::sqrt2 / std::numbers::pi;
    MatrixX<double> base = MatrixX<double>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) base(i, i) = plus_quarter ? std::pow(a(i), 0.25) : std::pow(a(i), -0.25);
    if (w.isZero(0.0)) return base;

    RankOneIntegrand f;
    f.dim = n;
    // geometric mean of the natural t-scales
    const double lg = a.array().log().mean();
    f.scale = std::exp((plus_quarter ? 0.25 : -0.25) * lg);
    if (plus_quarter) {
        f.eval = [&](double t, VectorX<double>& r) {
            const double t4 = t * t * t * t;
            double q = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = a(i) + t4;
                r(i) = w(i) / d;
                q += w(i) * w(i) / d;
            }
            return c * t4 / (1.0 + q);
        };
    } else {
        f.eval = [&](double t, VectorX<double>& r) {
            const double t4 = t * t * t * t;
            double q = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                // s_i = a_i^{-1} w_i / (a_i^{-1} + t^4)
                const double d = 1.0 + a(i) * t4;
                r(i) = w(i) / d;
                q += w(i) * w(i) / d;
            }
            return -c * t4 / (1.0 + t4 * q);
        };
    }
    auto res = integrate_rank_one(f, abs_tol);
    if (!res.converged)
        throw NumericalError("fourth-root quadrature did not converge (error " + std::to_string(res.error) + ")", 0.0,
                             res.error);
    return base + res.value;
}

ERoots e_roots(const VectorX<double>& h, const VectorX<double>& v, EMethod method, double abs_tol)
{
    ERoots r;
    if (method == EMethod::eigen) {
        auto c = one_body_core<double>(h, v, VectorX<double>::Zero(h.size()));
        r.E = std::move(c.E);
        r.E_half = std::move(c.E_half);
        r.E_inv_half = std::move(c.E_inv_half);
        return r;
    }
    const VectorX<double> a = h.cwiseProduct(h);
    const VectorX<double> w = std::numbers::sqrt2 * h.array().sqrt().matrix().cwiseProduct(v);
    r.E_half = fourth_root_rank_one(a, w, true, abs_tol);
    r.E_inv_half = fourth_root_rank_one(a, w, false, abs_tol);
    r.E = r.E_half * r.E_half;
    return r;
}

void SpectralBins::build_lookup()
{
    lookup_.clear();
    if (two_mu.empty()) return;
    offset_ = two_mu.front();
    lookup_.assign(static_cast<std::size_t>(two_mu.back() - offset_ + 1), -1);
    for (std::size_t a = 0; a < two_mu.size(); ++a)
        lookup_[static_cast<std::size_t>(two_mu[a] - offset_)] = static_cast<std::int32_t>(a);
}

SpectralBins spectral_bins(const Lune& L)
{
    std::map<std::int64_t, std::int64_t> h;
    for (auto tl : L.two_lambdas) ++h[tl];
    SpectralBins b;
    for (auto [tl, c] : h) {
        b.two_mu.push_back(tl);
        b.mu.push_back(0.5 * static_cast<double>(tl));
        b.count.push_back(static_cast<double>(c));
        b.total += c;
    }
    b.build_lookup();
    return b;
}

SpectralBins lune_bins(const FermiRadius& r, const FermiBall& ball, const LatticeVec& k)
{
    if (k.is_zero()) throw ValidationError("lune requires k != 0");
    const std::int64_t kk = k.norm_sq();
    // |q.k| <= k_F |k|
    const auto span = static_cast<std::int64_t>(std::ceil(std::sqrt(r.kf_sq() * static_cast<double>(kk)))) + 1;
    std::vector<std::int64_t> hist(static_cast<std::size_t>(2 * span + 1), 0);
    const std::int64_t four = r.four_kf_sq();
    for (const auto& q : ball.points) {
        const std::int64_t qk = dot(q, k);
        // |q+k|^2 = |q|^2 + 2 q.k + |k|^2 outside the ball
        if (4 * (q.norm_sq() + 2 * qk + kk) <= four) continue;
        ++hist[static_cast<std::size_t>(qk + span)];
    }
    SpectralBins b;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (!hist[i]) continue;
        const std::int64_t tl = 2 * (static_cast<std::int64_t>(i) - span) + kk;
        b.two_mu.push_back(tl);
        b.mu.push_back(0.5 * static_cast<double>(tl));
        b.count.push_back(static_cast<double>(hist[i]));
        b.total += hist[i];
    }
    b.build_lookup();
    return b;
}

BinnedMode build_binned_mode(const LatticeVec& k, SpectralBins bins, double g)
{
    BinnedMode m;
    m.k = k;
    m.g = g;
    m.bins = std::move(bins);
    const auto n = static_cast<Eigen::Index>(m.bins.size());
    if (n == 0) return m;
    VectorX<double> h(n), v(n), w(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double c = m.bins.count[static_cast<std::size_t>(a)];
        h(a) = m.bins.mu[static_cast<std::size_t>(a)];
        v(a) = std::sqrt(g * c);
        w(a) = g * std::sqrt(c);
    }
    m.core = one_body_core<double>(h, v, w);
    return m;
}

MatrixX<double> lift(const BinnedMode& bm, const Lune& L, const MatrixX<double>& red, const VectorX<double>& comp)
{
    const auto n = static_cast<Eigen::Index>(L.size());
    MatrixX<double> X(n, n);
    std::vector<std::int64_t> bin(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        bin[static_cast<std::size_t>(i)] = bm.bins.index_of(L.two_lambdas[static_cast<std::size_t>(i)]);
        if (bin[static_cast<std::size_t>(i)] < 0) throw ValidationError("lift: lune does not match bins");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = bin[static_cast<std::size_t>(i)];
        const double ca = bm.bins.count[static_cast<std::size_t>(a)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto b = bin[static_cast<std::size_t>(j)];
            const double cb = bm.bins.count[static_cast<std::size_t>(b)];
            double x = red(a, b) / std::sqrt(ca * cb);
            if (a == b) x -= comp(a) / ca;
            if (i == j) x += comp(a);
            X(i, j) = x;
        }
    }
    return X;
}

std::vector<double> secular_shifts(const std::vector<double>& d, const std::vector<double>& w)
{
    const std::size_t n = d.size();
    std::vector<double> s(n, 0.0);
    double wsum = 0.0;
    for (double x : w) wsum += x;
    if (wsum == 0.0) return s;
    // 1 + sum_a w_a / (delta_a - tau), delta_a = d_a - origin
    auto secular = [&](std::size_t origin, double tau, double& deriv) {
        double f = 1.0, df = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const double r = 1.0 / ((d[a] - d[origin]) - tau);
            f += w[a] * r;
            df += w[a] * r * r;
        }
        deriv = df;
        return f;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t origin = i;
        double lo, hi;
        if (i + 1 < n) {
            const double gap = d[i + 1] - d[i];
            double dummy;
            if (secular(i, 0.5 * gap, dummy) > 0.0) {
                lo = 0.0;
                hi = 0.5 * gap;
            } else {
                origin = i + 1;
                lo = -0.5 * gap;
                hi = 0.0;
            }
        } else {
            lo = 0.0;
            hi = wsum;
        }
        double tau = 0.5 * (lo + hi);
        for (int it = 0; it < 300; ++it) {
            double df;
            const double f = secular(origin, tau, df);
            if (f == 0.0) break;
            if (f > 0.0)
                hi = tau;
            else
                lo = tau;
            double next = tau - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - tau) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(next) ||
                hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
                tau = next;
                break;
            }
            tau = next;
        }
        s[i] = origin == i ? tau : (d[i + 1] - d[i]) + tau;
    }
    return s;
}

double trace_term_binned(const SpectralBins& bins, double g)
{
    const std::size_t n = bins.size();
    if (n == 0 || g == 0.0) return 0.0;
    std::vector<double> d(n), w(n);
    for (std::size_t a = 0; a < n; ++a) {
        d[a] = bins.mu[a] * bins.mu[a];
        w[a] = 2.0 * g * bins.mu[a] * bins.count[a];
    }
    const auto s = secular_shifts(d, w);
    NeumaierSum acc;
    for (std::size_t a = 0; a < n; ++a) {
        const double mu = bins.mu[a];
        acc.add(s[a] / (std::sqrt(d[a] + s[a]) + mu));
        acc.add(-g * bins.count[a]);
    }
    return acc.value();
}

}  // namespace gbcorr
