#include <doctest.h>

#include <cmath>
#include <limits>

#include "gbcorr/estimates.hpp"

using namespace gbcorr;

namespace {

double brute_kinetic(double kF, double R, bool fermi_only)
{
    const double z = zeta(kF);
    const int m = static_cast<int>(R) + 1;
    double s = 0.0;
    for (int x = -m; x <= m; ++x)
        for (int y = -m; y <= m; ++y)
            for (int zz = -m; zz <= m; ++zz) {
                const double n = x * x + y * y + zz * zz;
                if (n > R * R + 1e-9) continue;
                if (fermi_only && n > kF * kF + 1e-9) continue;
                s += 1.0 / std::abs(n - z);
            }
    return s;
}

ElementRatios dense_ratios(double kF, double beta, const PotentialModel& model, const LatticeVec& k)
{
    const auto m = build_mode<double>(kF, beta, model, k, false);
    const double vk = v_hat(model, k);
    const double lin = vk * std::pow(kF, -beta), quad = vk * vk * std::pow(kF, 1 - 2 * beta);
    ElementRatios r;
    for (Eigen::Index i = 0; i < m.dim(); ++i)
        for (Eigen::Index j = 0; j < m.dim(); ++j) {
            const double sum = m.lune.lambdas[std::size_t(i)] + m.lune.lambdas[std::size_t(j)];
            r.s = std::max(r.s, std::abs(m.S(i, j)) * sum / lin);
            r.c = std::max(r.c, std::abs(m.C(i, j) - (i == j)) * sum / lin);
            r.s_refined = std::max(r.s_refined, std::abs(m.S(i, j) - m.g / sum) * sum / quad);
        }
    return r;
}

}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("bound ratio conventions")
{
    CHECK(bound_ratio(1.0, 2.0) == 0.5);
    CHECK(bound_ratio(0.0, 0.0) == 0.0);
    CHECK(std::isinf(bound_ratio(1.0, 0.0)));
}

TEST_CASE("kinetic sums against brute force")
{
    for (double kF : {1.0, 2.0, 3.0, 4.5}) {
        CHECK(kinetic_sum_ball(kF, 2 * kF) == doctest::Approx(brute_kinetic(kF, 2 * kF, false)).epsilon(1e-12));
        CHECK(kinetic_sum_fermi_ball(kF) == doctest::Approx(brute_kinetic(kF, kF, true)).epsilon(1e-12));
        const FermiRadius r(kF);
        CHECK(kinetic_sum(r, fermi_ball(kF).points) == doctest::Approx(kinetic_sum_fermi_ball(kF)).epsilon(1e-12));
        std::int64_t cnt = 0;
        for (const auto& p : ball_points(static_cast<std::int64_t>(4 * kF * kF), true)) (void)p, ++cnt;
        CHECK(kinetic_set_limit(r) == cnt);
        const auto L = lune(kF, {1, 1, 0});
        CHECK(kinetic_sum_lune(kF, {1, 1, 0}) == doctest::Approx(kinetic_sum(r, L.points)).epsilon(1e-12));
    }
}

TEST_CASE("lune statistics")
{
    for (double kF : {2.0, 3.0}) {
        const LatticeVec k{2, 1, 0};
        const auto L = lune(kF, k);
        double inv = 0.0;
        for (double l : L.lambdas) inv += 1.0 / l;
        const auto st = lune_stats(kF, k);
        CHECK(st.size == static_cast<std::int64_t>(L.size()));
        CHECK(st.sum_inv_lambda == doctest::Approx(inv).epsilon(1e-12));
        CHECK(st.ratio_inv == doctest::Approx(inv / kF));
        CHECK(st.ratio_size == doctest::Approx(double(L.size()) / (kF * kF * std::min(std::sqrt(5.0), kF))));
        const FermiRadius r(kF);
        const auto st2 = lune_stats(r, lune_bins(r, fermi_ball(r), k), k);
        CHECK(st2.size == st.size);
        CHECK(st2.sum_inv_lambda == doctest::Approx(st.sum_inv_lambda).epsilon(1e-13));
    }
}

TEST_CASE("element ratios: binned equals dense")
{
    for (auto model : {PotentialModel::coulomb(1.0), PotentialModel::exponential(2.0, 0.4)})
        for (double beta : {1.0, 0.95})
            for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{2, 1, 1}, LatticeVec{4, 0, 0}}) {
                const auto a = element_ratios(3.0, beta, model, k);
                const auto b = dense_ratios(3.0, beta, model, k);
                CHECK(a.s == doctest::Approx(b.s).epsilon(1e-9));
                CHECK(a.c == doctest::Approx(b.c).epsilon(1e-9));
                CHECK(a.s_refined == doctest::Approx(b.s_refined).epsilon(1e-7));
                CHECK(std::isfinite(a.s));
            }
}

TEST_CASE("varphi and psi norms: binned equals dense")
{
    const auto model = PotentialModel::coulomb(1.0);
    for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{2, 1, 0}, LatticeVec{3, 3, 1}}) {
        const double kF = 2.5;
        const auto m = build_mode<double>(kF, 1.0, model, k, false);
        const auto d = varphi_psi_norms(m, kF, 1.0, v_hat(model, k));
        const auto bm = build_binned_mode(k, spectral_bins(m.lune), static_cast<double>(m.g));
        const auto b = varphi_psi_norms(bm, m.lune, kF, 1.0, v_hat(model, k));
        CHECK(b.max_phi == doctest::Approx(d.max_phi).epsilon(1e-9));
        CHECK(b.max_psi == doctest::Approx(d.max_psi).epsilon(1e-9));
        CHECK(b.sum_max_phi == doctest::Approx(d.sum_max_phi).epsilon(1e-9));
        CHECK(b.sum_max_psi == doctest::Approx(d.sum_max_psi).epsilon(1e-9));
        CHECK(b.scale == d.scale);
    }
}

TEST_CASE("radial sums")
{
    auto f = [](double r) { return 1.0 / (r * r * r * r); };
    double ref = 0.0;
    for (const auto& k : ball_points(max_norm_within(6.0), false)) ref += f(std::sqrt(double(k.norm_sq())));
    CHECK(radial_sum_within(f, 6.0) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(radial_sum_within(f, 6.0, 3.0) == doctest::Approx(radial_sum_within(f, 3.0)).epsilon(1e-13));
    const double far = radial_sum_beyond(f, 6.0);
    CHECK(far > 0.0);
    CHECK(radial_sum_beyond(f, 6.0, 5.0) == 0.0);
    // within + beyond is the full lattice sum, roughly 16.53 for |k|^-4
    CHECK(ref + far == doctest::Approx(16.5323).epsilon(2e-3));
}

TEST_CASE("error budget")
{
    const auto b = error_budget(4.0, 1.0, PotentialModel::coulomb(1.0), 0.1);
    CHECK(b.final_exponent == doctest::Approx(-1.0 / 6.0 + 0.1));
    CHECK(b.final_coefficient == doctest::Approx(std::pow(4.0, -1.0 / 6.0 + 0.1)));
    CHECK(b.sqrt_v2_outside_S > 0.0);
    CHECK(b.v3_sum > 0.0);
    CHECK(std::isfinite(b.fermi_state_envelope()));
    CHECK(b.fermi_state_envelope() > 0.0);
    const auto bad = error_budget(4.0, 1.0, PotentialModel::power_law(1.0, 1.5), 0.1);
    CHECK_FALSE(std::isfinite(bad.fermi_state_envelope()));
}

TEST_CASE("bosonic lower chain")
{
    const auto e = bos_lower_envelope(2.0, 1.0, PotentialModel::coulomb(1.0), 8.0, 0.1, 1e-9);
    CHECK(e.chain_holds);
    CHECK(e.doubled_bos <= e.pair_bound * (1 + 1e-12));
    CHECK(e.pair_bound <= e.stats_bound * (1 + 1e-12));
    CHECK(e.scaling_ratio > 0.0);
}

}
