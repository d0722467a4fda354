#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gbcorr/errors.hpp"
#include "gbcorr/lattice.hpp"

using namespace gbcorr;

namespace {

// plain triple loops, nothing shared with the library
std::vector<LatticeVec> brute_ball(double kF)
{
    std::vector<LatticeVec> out;
    const int m = static_cast<int>(std::ceil(kF)) + 1;
    for (int x = -m; x <= m; ++x)
        for (int y = -m; y <= m; ++y)
            for (int z = -m; z <= m; ++z)
                if (x * x + y * y + z * z <= kF * kF + 1e-9) out.push_back({x, y, z});
    return out;
}

struct BrutePoint {
    LatticeVec p;
    double lambda;
};

std::vector<BrutePoint> brute_lune(double kF, const LatticeVec& k)
{
    std::vector<BrutePoint> out;
    for (const auto& q : brute_ball(kF)) {
        const LatticeVec p = q + k;
        if (p.norm_sq() <= kF * kF + 1e-9) continue;
        out.push_back({p, 0.5 * static_cast<double>(p.norm_sq() - q.norm_sq())});
    }
    return out;
}

std::int64_t brute_r3(std::int64_t n)
{
    std::int64_t c = 0;
    const auto m = static_cast<std::int64_t>(std::sqrt(double(n))) + 1;
    for (std::int64_t x = -m; x <= m; ++x)
        for (std::int64_t y = -m; y <= m; ++y)
            for (std::int64_t z = -m; z <= m; ++z)
                if (x * x + y * y + z * z == n) ++c;
    return c;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("fermi ball matches brute force")
{
    for (double kF : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.5}) {
        const auto B = fermi_ball(kF);
        const auto ref = brute_ball(kF);
        CHECK(B.N == ref.size());
        CHECK(B.points.size() == B.N);
        CHECK(std::is_sorted(B.points.begin(), B.points.end(), canonical_less));
        for (const auto& p : ref) CHECK(std::find(B.points.begin(), B.points.end(), p) != B.points.end());
    }
    CHECK(fermi_ball(1.0).N == 7);
    CHECK(fermi_ball(2.0).N == 33);
    CHECK(fermi_ball(3.0).N == 123);
}

TEST_CASE("radius validation")
{
    CHECK_THROWS_AS(FermiRadius(0.0), ValidationError);
    CHECK_THROWS_AS(FermiRadius(-1.0), ValidationError);
    CHECK_THROWS_AS(FermiRadius(0.3), ValidationError);
    CHECK_THROWS_AS(FermiRadius(std::nan("")), ValidationError);
    CHECK(FermiRadius(1.5).four_kf_sq() == 9);
    CHECK(FermiRadius(std::sqrt(2.0)).four_kf_sq() == 8);
    CHECK(FermiRadius(2.5).floor_kf() == 2);
    CHECK(FermiRadius(3.0).floor_kf() == 3);
}

TEST_CASE("lune matches brute force")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-7, 7);
    for (double kF : {1.0, 2.0, 2.5, 3.0}) {
        for (int t = 0; t < 25; ++t) {
            LatticeVec k{d(rng), d(rng), d(rng)};
            if (k.is_zero()) continue;
            const auto L = lune(kF, k);
            const auto ref = brute_lune(kF, k);
            REQUIRE(L.size() == ref.size());
            CHECK(std::is_sorted(L.points.begin(), L.points.end(), canonical_less));
            for (const auto& bp : ref) {
                auto it = std::find(L.points.begin(), L.points.end(), bp.p);
                REQUIRE(it != L.points.end());
                const auto i = static_cast<std::size_t>(it - L.points.begin());
                CHECK(L.lambdas[i] == doctest::Approx(bp.lambda));
                CHECK(L.two_lambdas[i] == static_cast<std::int64_t>(std::llround(2 * bp.lambda)));
                CHECK(L.lambdas[i] > 0.0);
                CHECK(in_lune(FermiRadius(kF), k, bp.p));
            }
        }
    }
}

TEST_CASE("smallest lune at k_F = 1")
{
    const auto L = lune(1.0, {1, 0, 0});
    REQUIRE(L.size() == 5);
    std::multiset<double> lam(L.lambdas.begin(), L.lambdas.end());
    CHECK(lam.count(1.5) == 1);
    CHECK(lam.count(0.5) == 4);
    CHECK_THROWS_AS(lune(1.0, {0, 0, 0}), ValidationError);
}

TEST_CASE("lune size is N beyond 2 k_F")
{
    for (double kF : {1.0, 2.0, 3.0, 4.0}) {
        const auto N = fermi_ball(kF).N;
        const auto reach = static_cast<std::int64_t>(2 * kF) + 1;
        for (const LatticeVec& k : {LatticeVec{reach, 0, 0}, LatticeVec{reach, 1, -2}, LatticeVec{0, -reach - 3, 4}})
            CHECK(lune(kF, k).size() == N);
    }
}

TEST_CASE("lune size is invariant on orbits and under k -> -k")
{
    for (double kF : {1.5, 3.0}) {
        for (const LatticeVec& k : {LatticeVec{1, 0, 0}, LatticeVec{2, 1, 0}, LatticeVec{3, -2, 1}}) {
            const auto n = lune(kF, k).size();
            for (const auto& g : octahedral_images(k)) CHECK(lune(kF, g).size() == n);
            // p -> -p maps L_k onto L_{-k}
            const auto Lk = lune(kF, k);
            const auto Lm = lune(kF, -k);
            for (const auto& p : Lk.points) CHECK(in_lune(FermiRadius(kF), -k, -p));
            CHECK(Lm.size() == n);
        }
    }
}

TEST_CASE("octahedral images and orbit representatives")
{
    const LatticeVec v{3, -1, 2};
    const auto im = octahedral_images(v);
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> distinct;
    for (const auto& g : im) {
        CHECK(g.norm_sq() == v.norm_sq());
        CHECK(orbit_representative(g) == orbit_representative(v));
        distinct.insert({g.x, g.y, g.z});
    }
    CHECK(distinct.size() == 48);
    CHECK(orbit_size(v) == 48);
    CHECK(orbit_size({1, 0, 0}) == 6);
    CHECK(orbit_size({1, 1, 0}) == 12);
    CHECK(orbit_size({1, 1, 1}) == 8);
    CHECK(orbit_size({2, 1, 1}) == 24);
}

TEST_CASE("orbit table covers the ball")
{
    for (std::int64_t nmax : {1, 5, 20, 64}) {
        const auto T = orbits_by_norm(nmax);
        const auto pts = ball_points(nmax, false);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < T.size(); ++i) {
            total += T.multiplicities[i];
            CHECK(T.multiplicities[i] == orbit_size(T.representatives[i]));
            CHECK(orbit_representative(T.representatives[i]) == T.representatives[i]);
        }
        CHECK(total == static_cast<std::int64_t>(pts.size()));
        CHECK(std::is_sorted(pts.begin(), pts.end(), canonical_less));
    }
    CHECK(orbits(2.0).size() == orbits_by_norm(4).size());
}

TEST_CASE("r3 against brute force")
{
    const auto t = r3_table(60);
    for (std::int64_t n = 0; n <= 60; ++n) {
        CHECK(t[static_cast<std::size_t>(n)] == brute_r3(n));
        CHECK(r3(n) == brute_r3(n));
    }
    CHECK(r3(1) == 6);
    CHECK(r3(2) == 12);
    CHECK(r3(3) == 8);
    CHECK(r3(7) == 0);
    CHECK(r3(9) == 30);
    CHECK(r3(28) == 0);
}

TEST_CASE("zeta sits between occupied and empty levels")
{
    CHECK(zeta(1.0) == 1.5);
    CHECK(zeta(3.0) == 9.5);
    CHECK(zeta(std::sqrt(7.0)) == 7.0);  // r3(7) = 0, so 6 and 8
    for (double kF : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0}) {
        const FermiRadius r(kF);
        CHECK(sup_inside_norm(r) < inf_outside_norm(r));
        CHECK(r.inside_norm(sup_inside_norm(r)));
        CHECK_FALSE(r.inside_norm(inf_outside_norm(r)));
        CHECK(r3(sup_inside_norm(r)) > 0);
        CHECK(r3(inf_outside_norm(r)) > 0);
        for (const auto& p : brute_ball(kF + 2)) CHECK(std::abs(double(p.norm_sq()) - zeta(r)) >= 0.5);
    }
}

TEST_CASE("canonical order is a strict total order")
{
    const auto pts = ball_points(12, true);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        CHECK(canonical_less(pts[i], pts[i + 1]));
        CHECK_FALSE(canonical_less(pts[i + 1], pts[i]));
    }
    CHECK(pts.front() == LatticeVec{});
}

}
