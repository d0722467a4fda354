#include "gbcorr/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbcorr/errors.hpp"

namespace gbcorr {

std::array<LatticeVec, 48> octahedral_images(const LatticeVec& v)
{
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    const std::int64_t c[3] = {v.x, v.y, v.z};
    std::array<LatticeVec, 48> out{};
    int n = 0;
    for (const auto& pm : perms) {
        for (int s = 0; s < 8; ++s) {
            const std::int64_t sx = (s & 1) ? -1 : 1, sy = (s & 2) ? -1 : 1, sz = (s & 4) ? -1 : 1;
            out[n++] = {sx * c[pm[0]], sy * c[pm[1]], sz * c[pm[2]]};
        }
    }
    return out;
}

LatticeVec orbit_representative(const LatticeVec& v)
{
    std::int64_t a[3] = {std::abs(v.x), std::abs(v.y), std::abs(v.z)};
    std::sort(a, a + 3, std::greater<>());
    return {-a[0], -a[1], -a[2]};
}

FermiRadius::FermiRadius(double kF)
{
    if (!std::isfinite(kF) || kF <= 0.0) throw ValidationError("k_F must be positive and finite");
    const double q = 4.0 * kF * kF;
    const double rq = std::round(q);
    if (std::abs(q - rq) > 1e-9 * std::max(1.0, q) || rq > 1e15)
        throw ValidationError("k_F^2 must be a multiple of 1/4 (got k_F = " + std::to_string(kF) + ")");
    four_kf_sq_ = static_cast<std::int64_t>(rq);
    kf_ = std::sqrt(static_cast<double>(four_kf_sq_) / 4.0);
}

FermiRadius FermiRadius::from_four_kf_sq(std::int64_t q)
{
    if (q <= 0) throw ValidationError("4 k_F^2 must be positive");
    FermiRadius r;
    r.four_kf_sq_ = q;
    r.kf_ = std::sqrt(static_cast<double>(q) / 4.0);
    return r;
}

std::int64_t FermiRadius::floor_kf() const
{
    std::int64_t m = static_cast<std::int64_t>(std::floor(kf_));
    while (4 * (m + 1) * (m + 1) <= four_kf_sq_) ++m;
    while (m > 0 && 4 * m * m > four_kf_sq_) --m;
    return m;
}

std::int64_t max_norm_within(double R)
{
    if (!(R >= 0.0)) return -1;
    auto n = static_cast<std::int64_t>(std::floor(R * R * (1.0 + 1e-14) + 1e-9));
    return n;
}

std::vector<LatticeVec> ball_points(std::int64_t nmax, bool include_origin)
{
    std::vector<LatticeVec> pts;
    if (nmax < 0) return pts;
    const auto m = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(nmax)))) + 1;
    for (std::int64_t x = -m; x <= m; ++x)
        for (std::int64_t y = -m; y <= m; ++y)
            for (std::int64_t z = -m; z <= m; ++z) {
                const LatticeVec p{x, y, z};
                const auto n = p.norm_sq();
                if (n > nmax) continue;
                if (n == 0 && !include_origin) continue;
                pts.push_back(p);
            }
    std::sort(pts.begin(), pts.end(), CanonicalLess{});
    return pts;
}

FermiBall fermi_ball(const FermiRadius& r)
{
    FermiBall b;
    b.k_F = r.kf();
    b.points = ball_points(r.four_kf_sq() / 4, true);
    b.N = b.points.size();
    return b;
}

FermiBall fermi_ball(double kF) { return fermi_ball(FermiRadius(kF)); }

bool in_lune(const FermiRadius& r, const LatticeVec& k, const LatticeVec& p)
{
    return r.inside(p - k) && !r.inside(p);
}

Lune lune(const FermiRadius& r, const FermiBall& ball, const LatticeVec& k)
{
    if (k.is_zero()) throw ValidationError("lune requires k != 0");
    Lune L;
    L.k = k;
    const auto kk = k.norm_sq();
    for (const auto& q : ball.points) {
        const LatticeVec p = q + k;
        if (r.inside(p)) continue;
        L.points.push_back(p);
    }
    std::sort(L.points.begin(), L.points.end(), CanonicalLess{});
    L.lambdas.reserve(L.points.size());
    L.two_lambdas.reserve(L.points.size());
    for (const auto& p : L.points) {
        const std::int64_t tl = 2 * dot(p, k) - kk;
        L.two_lambdas.push_back(tl);
        L.lambdas.push_back(0.5 * static_cast<double>(tl));
    }
    return L;
}

Lune lune(double kF, const LatticeVec& k)
{
    const FermiRadius r(kF);
    return lune(r, fermi_ball(r), k);
}

std::int64_t sup_inside_norm(const FermiRadius& r)
{
    std::int64_t n = r.four_kf_sq() / 4;
    while (n > 0 && r3(n) == 0) --n;
    return n;
}

std::int64_t inf_outside_norm(const FermiRadius& r)
{
    std::int64_t n = r.four_kf_sq() / 4 + 1;
    while (r3(n) == 0) ++n;
    return n;
}

double zeta(const FermiRadius& r)
{
    return 0.5 * static_cast<double>(inf_outside_norm(r) + sup_inside_norm(r));
}

double zeta(double kF)
{
    const FermiRadius r(kF);
    if (r.four_kf_sq() < 4) throw ValidationError("zeta requires k_F >= 1");
    return zeta(r);
}

std::int64_t r3(std::int64_t n)
{
    if (n < 0) return 0;
    if (n == 0) return 1;
    std::int64_t count = 0;
    const auto m = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) + 1;
    for (std::int64_t x = -m; x <= m; ++x) {
        const std::int64_t rx = n - x * x;
        if (rx < 0) continue;
        for (std::int64_t y = -m; y <= m; ++y) {
            const std::int64_t rz = rx - y * y;
            if (rz < 0) continue;
            auto z = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rz))));
            while (z * z > rz) --z;
            while ((z + 1) * (z + 1) <= rz) ++z;
            if (z * z == rz) count += (z == 0) ? 1 : 2;
        }
    }
    return count;
}

std::vector<std::int64_t> r3_table(std::int64_t nmax)
{
    std::vector<std::int64_t> t(static_cast<std::size_t>(std::max<std::int64_t>(nmax, 0) + 1), 0);
    if (nmax < 0) return t;
    const auto m = static_cast<std::int64_t>(std::sqrt(static_cast<double>(nmax))) + 1;
    // x >= 0 half-space, weight 2 off the plane
    for (std::int64_t x = 0; x <= m; ++x) {
        const std::int64_t wx = x == 0 ? 1 : 2;
        for (std::int64_t y = 0; y <= m; ++y) {
            const std::int64_t wy = y == 0 ? 1 : 2;
            const std::int64_t nxy = x * x + y * y;
            if (nxy > nmax) break;
            for (std::int64_t z = 0; z <= m; ++z) {
                const std::int64_t n = nxy + z * z;
                if (n > nmax) break;
                t[static_cast<std::size_t>(n)] += wx * wy * (z == 0 ? 1 : 2);
            }
        }
    }
    return t;
}

std::int64_t orbit_size(const LatticeVec& v)
{
    std::int64_t a[3] = {std::abs(v.x), std::abs(v.y), std::abs(v.z)};
    std::sort(a, a + 3);
    std::int64_t perms = 6;
    if (a[0] == a[1] && a[1] == a[2])
        perms = 1;
    else if (a[0] == a[1] || a[1] == a[2])
        perms = 3;
    const int nz = (a[0] != 0) + (a[1] != 0) + (a[2] != 0);
    return perms * (std::int64_t{1} << nz);
}

OrbitTable orbits_by_norm(std::int64_t nmax)
{
    OrbitTable t;
    if (nmax < 1) return t;
    const auto m = static_cast<std::int64_t>(std::sqrt(static_cast<double>(nmax))) + 1;
    for (std::int64_t a = 0; a <= m; ++a)
        for (std::int64_t b = 0; b <= a; ++b)
            for (std::int64_t c = 0; c <= b; ++c) {
                const std::int64_t n = a * a + b * b + c * c;
                if (n == 0 || n > nmax) continue;
                t.representatives.push_back({-a, -b, -c});
            }
    std::sort(t.representatives.begin(), t.representatives.end(), CanonicalLess{});
    t.multiplicities.reserve(t.representatives.size());
    for (const auto& r : t.representatives) t.multiplicities.push_back(orbit_size(r));
    return t;
}

OrbitTable orbits(double Kmax)
{
    if (!(Kmax > 0.0)) throw ValidationError("K_max must be positive");
    return orbits_by_norm(max_norm_within(Kmax));
}

}  // namespace gbcorr
