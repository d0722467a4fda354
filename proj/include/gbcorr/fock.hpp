#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gbcorr/lattice.hpp"
#include "gbcorr/potential.hpp"

namespace gbcorr::fock {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

// occupied modes, strictly increasing in canonical order
using BasisState = std::vector<LatticeVec>;

struct BasisLess {
    bool operator()(const BasisState& a, const BasisState& b) const
    {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), canonical_less);
    }
};

template <class Scalar>
struct FockVector {
    std::map<BasisState, Scalar, BasisLess> terms;

    static FockVector basis(BasisState s, Scalar amp = Scalar(1))
    {
        FockVector v;
        v.add(std::move(s), amp);
        return v;
    }
    void add(const BasisState& s, const Scalar& amp)
    {
        if (amp == Scalar(0)) return;
        auto [it, fresh] = terms.try_emplace(s, amp);
        if (!fresh) {
            it->second += amp;
            if (it->second == Scalar(0)) terms.erase(it);
        }
    }
    FockVector& operator+=(const FockVector& o)
    {
        for (const auto& [s, a] : o.terms) add(s, a);
        return *this;
    }
    FockVector& operator-=(const FockVector& o)
    {
        for (const auto& [s, a] : o.terms) add(s, -a);
        return *this;
    }
    FockVector operator+(const FockVector& o) const { return FockVector(*this) += o; }
    FockVector operator-(const FockVector& o) const { return FockVector(*this) -= o; }
    FockVector scaled(const Scalar& c) const
    {
        FockVector v;
        if (c == Scalar(0)) return v;
        for (const auto& [s, a] : terms) v.terms.emplace(s, a * c);
        return v;
    }
    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }
    Scalar amplitude(const BasisState& s) const
    {
        auto it = terms.find(s);
        return it == terms.end() ? Scalar(0) : it->second;
    }
    // largest |amplitude|
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& [s, a] : terms) m = std::max(m, std::abs(static_cast<double>(a)));
        return m;
    }
};

// c_p (dagger = false) or c_p^* on one basis state; sign from the modes preceding p
std::optional<std::pair<BasisState, int>> apply_c(const LatticeVec& p, bool dagger, const BasisState& s);

template <class Scalar>
FockVector<Scalar> apply_c(const LatticeVec& p, bool dagger, const FockVector<Scalar>& v)
{
    FockVector<Scalar> out;
    for (const auto& [s, a] : v.terms) {
        auto r = apply_c(p, dagger, s);
        if (r) out.add(r->first, r->second > 0 ? a : Scalar(-a));
    }
    return out;
}

// one factor of a monomial in plain c-operators
struct Factor {
    LatticeVec p;
    bool dagger = false;
};

// coef * f_1 f_2 ... f_n, applied right to left
template <class Scalar>
void apply_monomial(const std::vector<Factor>& f, const Scalar& coef, const FockVector<Scalar>& v,
                    FockVector<Scalar>& out)
{
    if (coef == Scalar(0)) return;
    for (const auto& [s0, a] : v.terms) {
        BasisState s = s0;
        int sign = 1;
        bool alive = true;
        for (auto it = f.rbegin(); it != f.rend(); ++it) {
            auto r = apply_c(it->p, it->dagger, s);
            if (!r) {
                alive = false;
                break;
            }
            s = std::move(r->first);
            sign *= r->second;
        }
        if (alive) out.add(s, sign > 0 ? Scalar(a * coef) : Scalar(-(a * coef)));
    }
}

// Fermi-ball context; zeta defaults to the midpoint
class Context {
public:
    explicit Context(double kF);
    Context(double kF, const Rational& zeta);

    const FermiRadius& radius() const { return r_; }
    const FermiBall& ball() const { return ball_; }
    bool in_ball(const LatticeVec& p) const { return r_.inside(p); }
    const Rational& zeta() const { return zeta_; }
    // admissible zeta range [sup inside, inf outside]
    std::int64_t zeta_low() const { return sup_inside_norm(r_); }
    std::int64_t zeta_high() const { return inf_outside_norm(r_); }
    // c~_p is c_p outside the ball and c_p^* inside
    Factor tilde(const LatticeVec& p, bool dagger) const { return {p, in_ball(p) ? !dagger : dagger}; }
    BasisState fermi_state() const { return ball_.points; }

private:
    FermiRadius r_;
    FermiBall ball_;
    Rational zeta_;
};

// modes outside the ball occupied in any term of v
template <class Scalar>
std::set<LatticeVec, CanonicalLess> excited_modes(const Context& ctx, const FockVector<Scalar>& v)
{
    std::set<LatticeVec, CanonicalLess> m;
    for (const auto& [s, a] : v.terms)
        for (const auto& p : s)
            if (!ctx.in_ball(p)) m.insert(p);
    return m;
}

template <class Scalar>
Scalar to_scalar(const Rational& x);
template <>
inline Rational to_scalar<Rational>(const Rational& x)
{
    return x;
}
template <>
inline long double to_scalar<long double>(const Rational& x)
{
    return static_cast<long double>(x);
}

// coefficient vector on a lune, indexed like Lune::points
template <class Scalar>
struct LuneVector {
    Lune lune;
    std::vector<Scalar> c;
};

// dense row-major matrix; rational entries stay exact
template <class Scalar>
struct Dense {
    std::size_t n = 0, m = 0;
    std::vector<Scalar> a;
    Dense() = default;
    Dense(std::size_t rows, std::size_t cols) : n(rows), m(cols), a(rows * cols, Scalar(0)) {}
    Scalar& operator()(std::size_t i, std::size_t j) { return a[i * m + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return a[i * m + j]; }
    static Dense identity(std::size_t n)
    {
        Dense d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = Scalar(1);
        return d;
    }
    Dense transpose() const
    {
        Dense t(m, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    Dense operator*(const Dense& o) const
    {
        Dense r(n, o.m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k) {
                const Scalar x = (*this)(i, k);
                if (x == Scalar(0)) continue;
                for (std::size_t j = 0; j < o.m; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }
    Dense operator+(const Dense& o) const
    {
        Dense r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
        return r;
    }
    Dense operator-(const Dense& o) const
    {
        Dense r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
        return r;
    }
    Scalar trace() const
    {
        Scalar t(0);
        for (std::size_t i = 0; i < std::min(n, m); ++i) t += (*this)(i, i);
        return t;
    }
};

// named operators; each acts on a finitely supported vector exactly
template <class Scalar>
struct Ops {
    const Context& ctx;

    FockVector<Scalar> c_tilde(const LatticeVec& p, bool dagger, const FockVector<Scalar>& v) const;
    // b_{k,p} = c_{p-k}^* c_p, b_{k,p}^* = c_p^* c_{p-k}
    FockVector<Scalar> b(const LatticeVec& k, const LatticeVec& p, bool dagger, const FockVector<Scalar>& v) const;
    // b_k(phi) = sum <phi, e_p> b_{k,p};  b_k^*(phi) = sum <e_p, phi> b_{k,p}^*
    FockVector<Scalar> b_vec(const LatticeVec& k, const LuneVector<Scalar>& phi, bool dagger,
                             const FockVector<Scalar>& v) const;
    FockVector<Scalar> B(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const;
    FockVector<Scalar> D1(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const;
    FockVector<Scalar> D2(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const;
    FockVector<Scalar> D(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const;
    // sum ||p|^2 - zeta| c~_p^* c~_p
    FockVector<Scalar> hkin_prime(const FockVector<Scalar>& v) const;
    FockVector<Scalar> hkin_prime(const FockVector<Scalar>& v, const Rational& zeta) const;
    // sum |p|^2 c_p^* c_p - sum_{B_F} |p|^2
    FockVector<Scalar> hkin_shifted(const FockVector<Scalar>& v) const;
    // sum_{outside} c^* c and sum_{inside} c c^*
    FockVector<Scalar> number_excited(const FockVector<Scalar>& v) const;
    FockVector<Scalar> number_holes(const FockVector<Scalar>& v) const;
    // exchange correction eps_{k,l}(phi; psi)
    FockVector<Scalar> epsilon(const LatticeVec& k, const LatticeVec& l, const LuneVector<Scalar>& phi,
                               const LuneVector<Scalar>& psi, const FockVector<Scalar>& v) const;
    // sum_q c~_{q+a}^* c~_{q+b} over q in the given region (finite, or resolved by the state)
    FockVector<Scalar> pair_sum(const std::vector<LatticeVec>& qs, const LatticeVec& a, const LatticeVec& b,
                                const FockVector<Scalar>& v) const;
};

struct CheckResult {
    CheckResult() = default;
    explicit CheckResult(std::string n) : name(std::move(n)) {}
    std::string name;
    bool pass = true;
    double residual = 0.0;
    std::size_t cases = 0;
    std::string detail;
};

enum class Arithmetic { rational, extended };
std::string to_string(Arithmetic a);

struct SuiteOptions {
    double k_F = 1.0;
    Arithmetic arithmetic = Arithmetic::rational;
    std::uint64_t seed = 12345;
    int trials = 4;
    double tolerance = 1e-10;  // extended mode; rational mode demands zero
    PotentialModel model = PotentialModel::coulomb(1.0);
    double beta = 1.0;
};

// random N-particle states: superpositions of few-pair excitations of the Fermi state
template <class Scalar>
std::vector<FockVector<Scalar>> random_states(const Context& ctx, std::mt19937_64& rng, int count, int box = 3,
                                              int max_pairs = 2, int max_terms = 4);

template <class Scalar>
CheckResult check_car(const Context& ctx, std::mt19937_64& rng, int trials, int box, double tol);
template <class Scalar>
CheckResult check_quasi_boson_commutator(const Context& ctx, const LatticeVec& k, const LatticeVec& l,
                                         const LuneVector<Scalar>& phi, const LuneVector<Scalar>& psi,
                                         const std::vector<FockVector<Scalar>>& states, double tol);
template <class Scalar>
CheckResult check_epsilon_sign(const Context& ctx, const LatticeVec& k, const std::vector<FockVector<Scalar>>& states);
template <class Scalar>
CheckResult check_kinetic_commutator(const Context& ctx, const LatticeVec& k, const LatticeVec& p,
                                     const std::vector<FockVector<Scalar>>& states, double tol);
template <class Scalar>
CheckResult check_D_commutators(const Context& ctx, const LatticeVec& k, const LatticeVec& l,
                                const std::vector<FockVector<Scalar>>& states, std::mt19937_64& rng, double tol);

// one k of a finitely supported family; the partner -k is derived from the symmetry
template <class Scalar>
struct FamilyMember {
    LatticeVec k;
    Dense<Scalar> A, C, S;  // indexed by lune(k) points
};
template <class Scalar>
CheckResult check_quadratic_expansion(const Context& ctx, const std::vector<FamilyMember<Scalar>>& family,
                                      const std::vector<FockVector<Scalar>>& states, double tol);
template <class Scalar>
CheckResult check_trace_form_lemma(std::size_t dim, int trials, std::mt19937_64& rng, double tol);
template <class Scalar>
CheckResult check_e_fs(const Context& ctx, const PotentialModel& model, double beta, double tol);
template <class Scalar>
CheckResult check_number_identity(const Context& ctx, const std::vector<FockVector<Scalar>>& states, double tol);
template <class Scalar>
CheckResult check_kinetic_forms(const Context& ctx, const std::vector<FockVector<Scalar>>& states, double tol);

// per-mode matrix trace identity -2 tr(S E S^T) = tr(E - h - P) for a built mode
CheckResult check_trace_identity(double kF, double beta, const PotentialModel& model, const LatticeVec& k, double tol);

struct SuiteReport {
    std::vector<CheckResult> checks;
    Arithmetic arithmetic = Arithmetic::rational;
    bool all_pass() const;
};

SuiteReport run_suite(const SuiteOptions& opt);

}  // namespace gbcorr::fock
