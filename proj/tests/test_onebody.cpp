#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gbcorr/correlation.hpp"
#include "gbcorr/onebody.hpp"

using namespace gbcorr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// f(M) for symmetric M straight from Eigen
template <class F>
MatrixXd matfun(const MatrixXd& M, F f)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
    VectorXd d = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

struct Ref {
    MatrixXd E, C, S;
};

Ref reference(const VectorXd& h, const VectorXd& v)
{
    const VectorXd hs = h.cwiseSqrt();
    MatrixXd M = h.asDiagonal();
    M = M * M;
    M += 2.0 * (hs.cwiseProduct(v)) * (hs.cwiseProduct(v)).transpose();
    Ref r;
    r.E = matfun(M, [](double x) { return std::sqrt(x); });
    const MatrixXd q = matfun(M, [](double x) { return std::pow(x, 0.25); });
    const MatrixXd mq = matfun(M, [](double x) { return std::pow(x, -0.25); });
    const MatrixXd a = hs.cwiseInverse().asDiagonal() * q;
    const MatrixXd b = hs.asDiagonal() * mq;
    r.C = 0.5 * (a + b);
    r.S = 0.5 * (a - b);
    return r;
}

double maxabs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("onebody") {

TEST_CASE("one dimension in closed form")
{
    const double a = 1.7, g = 0.3;
    VectorXd h(1), v(1), w(1);
    h << a;
    v << std::sqrt(g);
    w << g;
    const auto c = one_body_core<double>(h, v, w);
    const double e = std::sqrt(a * a + 2 * a * g);
    CHECK(c.E(0, 0) == doctest::Approx(e));
    CHECK(c.C(0, 0) == doctest::Approx(0.5 * (std::sqrt(e / a) + std::sqrt(a / e))));
    CHECK(c.S(0, 0) == doctest::Approx(0.5 * (std::sqrt(e / a) - std::sqrt(a / e))));
    CHECK(c.v_h_inv_v == doctest::Approx(g / a));
}

TEST_CASE("core against direct matrix functions")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.2, 4.0);
    for (int n : {2, 5, 12}) {
        VectorXd h(n), v(n);
        for (int i = 0; i < n; ++i) h(i) = u(rng), v(i) = u(rng) / 3;
        const auto c = one_body_core<double>(h, v, v);
        const auto r = reference(h, v);
        CHECK(maxabs(c.E - r.E) < 1e-11);
        CHECK(maxabs(c.C - r.C) < 1e-11);
        CHECK(maxabs(c.S - r.S) < 1e-11);
        // (C - S)(C + S)^T = 1 and C^2 - S^2 style identities
        const MatrixXd I = MatrixXd::Identity(n, n);
        CHECK(maxabs((c.C - c.S) * (c.C + c.S).transpose() - I) < 1e-11);
        CHECK(maxabs(c.E_half * c.E_half - c.E) < 1e-11);
        CHECK(maxabs(c.E_half * c.E_inv_half - I) < 1e-11);
    }
}

TEST_CASE("E dominates h")
{
    const auto m = build_mode<double>(2.0, 1.0, PotentialModel::coulomb(1.0), {1, 1, 0}, false);
    const MatrixXd D = m.E - MatrixXd(m.h_diag.asDiagonal());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(D);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(m.C.rows() == static_cast<Eigen::Index>(m.lune.size()));
}

TEST_CASE("mode coupling")
{
    const auto model = PotentialModel::coulomb(1.0);
    const double expected = 1.0 / 2.0 / std::pow(2.0, 1.0) / (2.0 * two_pi_cubed);
    CHECK(mode_coupling(2.0, 1.0, model, {1, 1, 0}) == doctest::Approx(expected));
    CHECK(mode_coupling_norm(2.0, 1.0, model, 2) == doctest::Approx(expected));
    CHECK_THROWS_AS(build_mode<double>(2.0, 1.5, model, {1, 0, 0}, false), ValidationError);
}

TEST_CASE("trace term is the single-point formula on a one-point lune")
{
    Lune L;
    L.k = {1, 0, 0};
    L.points = {{1, 0, 0}};
    L.lambdas = {0.5};
    L.two_lambdas = {1};
    const double g = 0.8;
    const auto m = build_mode_from_lune<double>(L, g, false);
    CHECK(trace_term(m) == doctest::Approx(std::sqrt(0.25 + g) - 0.5 - g));
}

TEST_CASE("binned reduction reproduces the dense operators")
{
    const auto model = PotentialModel::coulomb(1.0);
    for (double kF : {2.0, 3.0}) {
        for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{2, 1, 0}, LatticeVec{1, 1, 1}}) {
            const auto m = build_mode<double>(kF, 1.0, model, k, true);
            const auto bins = spectral_bins(m.lune);
            const auto bm = build_binned_mode(k, bins, static_cast<double>(m.g));
            const auto nb = static_cast<Eigen::Index>(bins.size());
            VectorXd mu(nb);
            for (Eigen::Index a = 0; a < nb; ++a) mu(a) = bins.mu[static_cast<std::size_t>(a)];
            CHECK(maxabs(lift(bm, m.lune, bm.core.C, VectorXd::Ones(nb)) - m.C) < 1e-11);
            CHECK(maxabs(lift(bm, m.lune, bm.core.S, VectorXd::Zero(nb)) - m.S) < 1e-11);
            CHECK(maxabs(lift(bm, m.lune, bm.core.E, mu) - m.E) < 1e-10);
            CHECK(trace_term_binned(bins, static_cast<double>(m.g)) == doctest::Approx(trace_term(m)).epsilon(1e-10));
            // lune_bins histograms without building the lune
            const auto lb = lune_bins(FermiRadius(kF), fermi_ball(kF), k);
            CHECK(lb.two_mu == bins.two_mu);
            CHECK(lb.count == bins.count);
            CHECK(bins.total == static_cast<std::int64_t>(m.lune.size()));
        }
    }
}

TEST_CASE("secular shifts give the rank-one spectrum")
{
    std::vector<double> d{0.5, 1.0, 1.5, 3.0, 7.5};
    std::vector<double> w{0.1, 0.4, 0.05, 2.0, 0.3};
    const auto s = secular_shifts(d, w);
    VectorXd z(5);
    for (int i = 0; i < 5; ++i) z(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
    MatrixXd M = VectorXd::Map(d.data(), 5).asDiagonal();
    M += z * z.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
    for (int i = 0; i < 5; ++i) {
        CHECK(s[static_cast<std::size_t>(i)] >= 0.0);
        CHECK(d[static_cast<std::size_t>(i)] + s[static_cast<std::size_t>(i)] ==
              doctest::Approx(es.eigenvalues()(i)).epsilon(1e-12));
    }
}

TEST_CASE("fourth roots by resolvent integral")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int n : {1, 3, 8}) {
        VectorXd a(n), w(n);
        for (int i = 0; i < n; ++i) a(i) = u(rng), w(i) = u(rng) / 2;
        MatrixXd M = a.asDiagonal();
        M += w * w.transpose();
        const MatrixXd plus = fourth_root_rank_one(a, w, true);
        const MatrixXd minus = fourth_root_rank_one(a, w, false);
        CHECK(maxabs(plus - matfun(M, [](double x) { return std::pow(x, 0.25); })) < 1e-8);
        CHECK(maxabs(minus - matfun(M, [](double x) { return std::pow(x, -0.25); })) < 1e-8);
    }
    VectorXd h(4), v(4);
    h << 0.5, 1.0, 1.5, 2.5;
    v << 0.3, 0.3, 0.3, 0.3;
    const auto ri = e_roots(h, v, EMethod::rank_one_integral);
    const auto re = e_roots(h, v, EMethod::eigen);
    CHECK(maxabs(ri.E - re.E) < 1e-8);
    CHECK(maxabs(ri.E_half - re.E_half) < 1e-8);
}

TEST_CASE("eta energy closed form")
{
    const auto model = PotentialModel::coulomb(1.0);
    for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{2, 2, 1}}) {
        const auto m = build_mode<double>(3.0, 1.0, model, k, true);
        const auto r = eta_e_eta(m);
        CHECK(r.direct == doctest::Approx(r.closed_form).epsilon(1e-10));
        const auto off = build_mode<double>(3.0, 1.0, model, k, false);
        CHECK(off.eta.isZero());
        CHECK_THROWS_AS(eta_e_eta(off), ValidationError);
    }
}

TEST_CASE("long double build agrees with double")
{
    const auto model = PotentialModel::coulomb(1.0);
    const auto md = build_mode<double>(2.0, 1.0, model, {1, 0, 1}, false);
    const auto ml = build_mode<long double>(2.0, 1.0, model, {1, 0, 1}, false);
    CHECK(maxabs(ml.S.cast<double>() - md.S) < 1e-13);
}

}
