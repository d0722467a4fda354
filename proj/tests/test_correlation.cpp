#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gbcorr/correlation.hpp"

using namespace gbcorr;

namespace {

const double base = 1.0 / (4.0 * two_pi_cubed * two_pi_cubed);

Lune one_point(double lambda)
{
    Lune L;
    L.k = {1, 0, 0};
    L.points = {{1, 0, 0}};
    L.lambdas = {lambda};
    L.two_lambdas = {static_cast<std::int64_t>(std::llround(2 * lambda))};
    return L;
}

// full k and (p, q) loops without orbit reduction
double brute_exchange(double kF, double beta, const PotentialModel& model, double Kmax)
{
    double total = 0.0;
    for (const auto& k : ball_points(max_norm_within(Kmax), false)) {
        const auto L = lune(kF, k);
        double inner = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i)
            for (std::size_t j = 0; j < L.size(); ++j)
                inner += model.of_norm((L.points[i] + L.points[j] - k).norm_sq()) / (L.lambdas[i] + L.lambdas[j]);
        total += model.of_norm(k.norm_sq()) * inner;
    }
    return std::pow(kF, -2 * beta) * base * total;
}

double brute_second_order(double kF, double beta, const PotentialModel& model, double Kmax)
{
    double total = 0.0;
    for (const auto& k : ball_points(max_norm_within(Kmax), false)) {
        const auto L = lune(kF, k);
        double inner = 0.0;
        for (double a : L.lambdas)
            for (double b : L.lambdas) inner += 1.0 / (a + b);
        total += std::pow(model.of_norm(k.norm_sq()), 2) * inner;
    }
    return -std::pow(kF, -2 * beta) * base * total;
}

}  // namespace

TEST_SUITE("correlation") {

TEST_CASE("F is log(1+x) - x")
{
    CHECK(F(0.0) == 0.0);
    CHECK(F(1.0) == doctest::Approx(std::log(2.0) - 1.0));
    CHECK(F(1e-9) == doctest::Approx(-0.5e-18).epsilon(1e-6));
    CHECK(F(3.0) < 0.0);
}

TEST_CASE("single-point lune integral")
{
    const auto bins = spectral_bins(one_point(1.0));
    const auto b = bos_term(bins, 1.0, 1e-13);
    CHECK(std::abs(b.value - (std::sqrt(3.0) - 2.0)) <= 1e-10);
    CHECK(trace_term_binned(bins, 1.0) == doctest::Approx(std::sqrt(3.0) - 2.0).epsilon(1e-14));
}

TEST_CASE("lindhard sums from points and bins agree")
{
    const auto L = lune(2.0, {1, 1, 0});
    const auto b = spectral_bins(L);
    for (double t : {0.0, 0.3, 2.0, 40.0}) CHECK(lindhard_sum(L, t) == doctest::Approx(lindhard_sum(b, t)).epsilon(1e-14));
}

TEST_CASE("per-mode quadrature equals the trace")
{
    const auto model = PotentialModel::coulomb(1.0);
    for (double kF : {1.0, 2.0, 3.0})
        for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{1, 1, 1}, LatticeVec{3, 2, 0}, LatticeVec{7, 0, 0}}) {
            const auto bins = lune_bins(FermiRadius(kF), fermi_ball(kF), k);
            const double g = mode_coupling(kF, 1.0, model, k);
            const auto b = bos_term(bins, g);
            const double tr = trace_term_binned(bins, g);
            CHECK(std::abs(b.value - tr) <= 1e-8 * (1 + std::abs(tr)));
            CHECK(b.value <= 0.0);
            // F(x) >= -x^2/2 bounds each mode by its second-order term
            CHECK(b.value >= second_order_term(bins, model.of_norm(k.norm_sq()) / kF) * (1 + 1e-12));
        }
}

TEST_CASE("bosonic sum: both paths and threads")
{
    const auto model = PotentialModel::coulomb(1.0);
    BosOptions o;
    o.with_second_order = true;
    const auto a = e_corr_bos(2.0, 1.0, model, 8.0, o);
    CHECK(a.value < 0.0);
    CHECK(std::abs(a.value - a.trace_value) <= 1e-7 * std::abs(a.trace_value));
    CHECK(a.second_order <= a.value);
    o.threads = 3;
    const auto b = e_corr_bos(2.0, 1.0, model, 8.0, o);
    CHECK(a.value == b.value);
    CHECK(a.trace_value == b.trace_value);
    REQUIRE(a.rows.size() == orbits(8.0).size());
    double s = 0.0;
    for (const auto& r : a.rows) s += double(r.multiplicity) * r.bos_term;
    CHECK(s == doctest::Approx(a.value).epsilon(1e-13));
}

TEST_CASE("exchange and second order against pair loops")
{
    for (auto model : {PotentialModel::coulomb(1.0), PotentialModel::exponential(1.0, 0.5)})
        for (double kF : {1.0, 2.0}) {
            const double K = 2 * kF;
            const auto ex = e_corr_ex(kF, 1.0, model, K);
            const double ref = brute_exchange(kF, 1.0, model, K);
            CHECK(ex.value >= 0.0);
            CHECK(std::abs(ex.value - ref) <= 1e-10 * ref);
            const double so = second_order(kF, 0.9, model, K);
            const double sref = brute_second_order(kF, 0.9, model, K);
            CHECK(std::abs(so - sref) <= 1e-10 * std::abs(sref));
        }
}

TEST_CASE("pair inverse sum: direct and integral branches")
{
    // a wide lune exercises the integral branch
    const auto L = lune(12.0, {7, 5, 3});
    const auto b = spectral_bins(L);
    REQUIRE(b.size() > 96);
    double ref = 0.0;
    for (std::size_t a = 0; a < b.size(); ++a)
        for (std::size_t c = 0; c < b.size(); ++c) ref += b.count[a] * b.count[c] / (b.mu[a] + b.mu[c]);
    CHECK(pair_inverse_sum(b) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("continuum tail of a power")
{
    // sum_{|k| > K} |k|^-6 ~ 4 pi / (3 R^3) for the matching radius R
    const double t = continuum_tail([](double r) { return std::pow(r, -6.0); }, 10.0);
    const double vol = double(ball_points(100, true).size());
    const double R = std::cbrt(3 * vol / (4 * std::numbers::pi));
    CHECK(t == doctest::Approx(4 * std::numbers::pi / (3 * R * R * R)).epsilon(1e-8));
    CHECK(continuum_tail([](double r) { return 1.0 / (r * r * r * r); }, 5.0, 4.0) == 0.0);
}

TEST_CASE("full report")
{
    CorrelationOptions o;
    o.with_eb6 = true;
    const auto r = compute_correlation(1.0, 1.0, PotentialModel::coulomb(1.0), o);
    CHECK(r.K_max_bos == 4.0);
    CHECK(r.K_max_ex == 2.0);
    CHECK(r.e_bos_quadrature < 0.0);
    CHECK(r.e_ex > 0.0);
    CHECK(r.e_b6 > 0.0);
    CHECK(r.per_orbit.size() == orbits(4.0).size());
    CHECK(r.beta_in_theorem_range);
    const auto zero = compute_correlation(2.0, 1.0, PotentialModel::coulomb(0.0), o);
    CHECK(zero.e_bos_quadrature == 0.0);
    CHECK(zero.e_ex == 0.0);
    CHECK(zero.e_b6 == 0.0);
}

TEST_CASE("E_B6 tracks the exchange term")
{
    const auto model = PotentialModel::coulomb(1.0);
    const auto e = eb6_exchange(2.0, 1.0, model, 4.0);
    CHECK(e.e_ex == doctest::Approx(e_corr_ex(2.0, 1.0, model, 4.0).value));
    CHECK(e.deviation == doctest::Approx(std::abs(e.value - e.e_ex)));
    CHECK(e.sum_v_cubed > 0.0);
}

}
