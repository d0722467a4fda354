#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace gbcorr {

struct LatticeVec {
    std::int64_t x = 0, y = 0, z = 0;

    constexpr std::int64_t norm_sq() const { return x * x + y * y + z * z; }
    constexpr bool is_zero() const { return x == 0 && y == 0 && z == 0; }

    constexpr LatticeVec operator-() const { return {-x, -y, -z}; }
    constexpr LatticeVec operator+(const LatticeVec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr LatticeVec operator-(const LatticeVec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr bool operator==(const LatticeVec&) const = default;
};

constexpr std::int64_t dot(const LatticeVec& a, const LatticeVec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// (norm², x, y, z); the one total order used everywhere
constexpr bool canonical_less(const LatticeVec& a, const LatticeVec& b)
{
    const auto na = a.norm_sq(), nb = b.norm_sq();
    if (na != nb) return na < nb;
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

struct CanonicalLess {
    bool operator()(const LatticeVec& a, const LatticeVec& b) const { return canonical_less(a, b); }
};

// all 48 signed permutations
std::array<LatticeVec, 48> octahedral_images(const LatticeVec& v);
LatticeVec orbit_representative(const LatticeVec& v);

// k_F is carried as the exact integer 4 k_F^2
class FermiRadius {
public:
    explicit FermiRadius(double kF);
    static FermiRadius from_four_kf_sq(std::int64_t q);

    double kf() const { return kf_; }
    double kf_sq() const { return static_cast<double>(four_kf_sq_) / 4.0; }
    std::int64_t four_kf_sq() const { return four_kf_sq_; }
    bool inside(const LatticeVec& p) const { return 4 * p.norm_sq() <= four_kf_sq_; }
    bool inside_norm(std::int64_t n) const { return 4 * n <= four_kf_sq_; }
    // largest integer m with m <= k_F
    std::int64_t floor_kf() const;

private:
    FermiRadius() = default;
    std::int64_t four_kf_sq_ = 0;
    double kf_ = 0.0;
};

struct FermiBall {
    double k_F = 0.0;
    std::vector<LatticeVec> points;
    std::size_t N = 0;
};

FermiBall fermi_ball(double kF);
FermiBall fermi_ball(const FermiRadius& r);

struct Lune {
    LatticeVec k;
    std::vector<LatticeVec> points;
    std::vector<double> lambdas;
    std::vector<std::int64_t> two_lambdas;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

Lune lune(double kF, const LatticeVec& k);
Lune lune(const FermiRadius& r, const FermiBall& ball, const LatticeVec& k);
bool in_lune(const FermiRadius& r, const LatticeVec& k, const LatticeVec& p);

double zeta(double kF);
double zeta(const FermiRadius& r);
// smallest |p|^2 outside and largest |q|^2 inside the ball
std::int64_t inf_outside_norm(const FermiRadius& r);
std::int64_t sup_inside_norm(const FermiRadius& r);

std::int64_t r3(std::int64_t n);
// counts[n] = r3(n) for 0 <= n <= nmax
std::vector<std::int64_t> r3_table(std::int64_t nmax);

struct OrbitTable {
    std::vector<LatticeVec> representatives;
    std::vector<std::int64_t> multiplicities;

    std::size_t size() const { return representatives.size(); }
};

std::int64_t orbit_size(const LatticeVec& v);
OrbitTable orbits(double Kmax);
// orbits of nonzero k with |k|^2 <= nmax
OrbitTable orbits_by_norm(std::int64_t nmax);

// every nonzero vector with |k|^2 <= nmax, canonical order
std::vector<LatticeVec> ball_points(std::int64_t nmax, bool include_origin);

std::int64_t max_norm_within(double R);

}  // namespace gbcorr

template <>
struct std::hash<gbcorr::LatticeVec> {
    std::size_t operator()(const gbcorr::LatticeVec& v) const noexcept
    {
        std::uint64_t h = static_cast<std::uint64_t>(v.x) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<std::uint64_t>(v.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(v.z) + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};
