#include "gbcorr/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbcorr/errors.hpp"
#include "gbcorr/onebody.hpp"

namespace gbcorr::fock {

std::optional<std::pair<BasisState, int>> apply_c(const LatticeVec& p, bool dagger, const BasisState& s)
{
    auto it = std::lower_bound(s.begin(), s.end(), p, canonical_less);
    const bool occupied = it != s.end() && *it == p;
    if (occupied == dagger) return std::nullopt;
    const auto pos = it - s.begin();
    const int sign = (pos % 2) ? -1 : 1;
    BasisState out;
    out.reserve(s.size() + 1);
    out.insert(out.end(), s.begin(), it);
    if (dagger) {
        out.push_back(p);
        out.insert(out.end(), it, s.end());
    } else {
        out.insert(out.end(), it + 1, s.end());
    }
    return std::make_pair(std::move(out), sign);
}

Context::Context(double kF) : r_(kF), ball_(fermi_ball(r_))
{
    zeta_ = Rational(sup_inside_norm(r_) + inf_outside_norm(r_), 2);
}

Context::Context(double kF, const Rational& zeta) : r_(kF), ball_(fermi_ball(r_)), zeta_(zeta)
{
    if (zeta < Rational(sup_inside_norm(r_)) || zeta > Rational(inf_outside_norm(r_)))
        throw ValidationError("zeta outside the admissible range");
}

std::string to_string(Arithmetic a) { return a == Arithmetic::rational ? "rational" : "extended"; }

namespace {

std::optional<std::size_t> index_in(const Lune& L, const LatticeVec& p)
{
    auto it = std::lower_bound(L.points.begin(), L.points.end(), p, canonical_less);
    if (it == L.points.end() || !(*it == p)) return std::nullopt;
    return static_cast<std::size_t>(it - L.points.begin());
}

template <class Scalar>
Scalar abs_of(const Scalar& x)
{
    return x < Scalar(0) ? Scalar(-x) : x;
}

template <class Scalar>
Scalar rat(std::int64_t num, std::int64_t den = 1)
{
    return to_scalar<Scalar>(Rational(num, den));
}

template <class Scalar>
Scalar random_rational(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-6, 6), den(1, 5);
    int a = 0;
    while (a == 0) a = num(rng);
    return rat<Scalar>(a, den(rng));
}

template <class Scalar>
bool within(const FockVector<Scalar>& diff, double tol, double& worst)
{
    const double m = diff.max_abs();
    worst = std::max(worst, m);
    if constexpr (std::is_same_v<Scalar, Rational>)
        return diff.empty();
    else
        return m <= tol;
}

// sum_{x in modes} coef(x) c_{f(x)}^* c_{g(x)} in plain c-language
template <class Scalar>
void add_pair(const Context& ctx, const LatticeVec& a, bool adag, const LatticeVec& b, bool bdag, const Scalar& coef,
              const FockVector<Scalar>& v, FockVector<Scalar>& out)
{
    const Factor fa = ctx.tilde(a, adag), fb = ctx.tilde(b, bdag);
    apply_monomial<Scalar>({fa, fb}, coef, v, out);
}

template <class Scalar>
FockVector<Scalar> commutator(const std::function<FockVector<Scalar>(const FockVector<Scalar>&)>& A,
                              const std::function<FockVector<Scalar>(const FockVector<Scalar>&)>& B,
                              const FockVector<Scalar>& v)
{
    return A(B(v)) - B(A(v));
}

template <class Scalar>
FockVector<Scalar> anticommutator(const std::function<FockVector<Scalar>(const FockVector<Scalar>&)>& A,
                                  const std::function<FockVector<Scalar>(const FockVector<Scalar>&)>& B,
                                  const FockVector<Scalar>& v)
{
    return A(B(v)) + B(A(v));
}

template <class Scalar>
using OpFn = std::function<FockVector<Scalar>(const FockVector<Scalar>&)>;

}  // namespace

// ---------------------------------------------------------------- named operators

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::c_tilde(const LatticeVec& p, bool dagger, const FockVector<Scalar>& v) const
{
    const Factor f = ctx.tilde(p, dagger);
    return apply_c(f.p, f.dagger, v);
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::b(const LatticeVec& k, const LatticeVec& p, bool dagger,
                                  const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    if (dagger)
        apply_monomial<Scalar>({{p, true}, {p - k, false}}, Scalar(1), v, out);
    else
        apply_monomial<Scalar>({{p - k, true}, {p, false}}, Scalar(1), v, out);
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::b_vec(const LatticeVec& k, const LuneVector<Scalar>& phi, bool dagger,
                                      const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (std::size_t i = 0; i < phi.lune.size(); ++i) {
        const auto& p = phi.lune.points[i];
        if (dagger)
            apply_monomial<Scalar>({{p, true}, {p - k, false}}, phi.c[i], v, out);
        else
            apply_monomial<Scalar>({{p - k, true}, {p, false}}, phi.c[i], v, out);
    }
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::B(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const
{
    const Lune L = lune(ctx.radius(), ctx.ball(), k);
    LuneVector<Scalar> one{L, std::vector<Scalar>(L.size(), Scalar(1))};
    return b_vec(k, one, dagger, v);
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::D1(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const
{
    // sum over p, p - k outside the ball of c_{p-k}^* c_p; only occupied p contribute
    FockVector<Scalar> out;
    for (const auto& x : excited_modes(ctx, v)) {
        const LatticeVec p = dagger ? x + k : x;
        const LatticeVec pk = p - k;
        if (ctx.in_ball(p) || ctx.in_ball(pk)) continue;
        if (dagger)
            apply_monomial<Scalar>({{p, true}, {pk, false}}, Scalar(1), v, out);
        else
            apply_monomial<Scalar>({{pk, true}, {p, false}}, Scalar(1), v, out);
    }
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::D2(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (const auto& p : ctx.ball().points) {
        const LatticeVec pk = p - k;
        if (!ctx.in_ball(pk)) continue;
        if (dagger)
            apply_monomial<Scalar>({{p, true}, {pk, false}}, Scalar(1), v, out);
        else
            apply_monomial<Scalar>({{pk, true}, {p, false}}, Scalar(1), v, out);
    }
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::D(const LatticeVec& k, bool dagger, const FockVector<Scalar>& v) const
{
    return D1(k, dagger, v) + D2(k, dagger, v);
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::hkin_prime(const FockVector<Scalar>& v) const
{
    return hkin_prime(v, ctx.zeta());
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::hkin_prime(const FockVector<Scalar>& v, const Rational& zeta) const
{
    FockVector<Scalar> out;
    auto modes = excited_modes(ctx, v);
    for (const auto& p : ctx.ball().points) modes.insert(p);
    for (const auto& p : modes) {
        const Rational w = abs_of(Rational(p.norm_sq()) - zeta);
        add_pair<Scalar>(ctx, p, true, p, false, to_scalar<Scalar>(w), v, out);
    }
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::hkin_shifted(const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (const auto& p : excited_modes(ctx, v))
        apply_monomial<Scalar>({{p, true}, {p, false}}, rat<Scalar>(p.norm_sq()), v, out);
    std::int64_t e0 = 0;
    for (const auto& p : ctx.ball().points) {
        apply_monomial<Scalar>({{p, true}, {p, false}}, rat<Scalar>(p.norm_sq()), v, out);
        e0 += p.norm_sq();
    }
    out -= v.scaled(rat<Scalar>(e0));
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::number_excited(const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (const auto& p : excited_modes(ctx, v)) apply_monomial<Scalar>({{p, true}, {p, false}}, Scalar(1), v, out);
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::number_holes(const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (const auto& p : ctx.ball().points) apply_monomial<Scalar>({{p, false}, {p, true}}, Scalar(1), v, out);
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::epsilon(const LatticeVec& k, const LatticeVec& l, const LuneVector<Scalar>& phi,
                                        const LuneVector<Scalar>& psi, const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    // q in L_k and L_l
    for (std::size_t i = 0; i < phi.lune.size(); ++i) {
        const auto& q = phi.lune.points[i];
        const auto j = index_in(psi.lune, q);
        if (!j) continue;
        add_pair<Scalar>(ctx, q - l, true, q - k, false, Scalar(-(phi.c[i] * psi.c[*j])), v, out);
    }
    // q in (L_k - k) and (L_l - l)
    for (std::size_t i = 0; i < phi.lune.size(); ++i) {
        const LatticeVec q = phi.lune.points[i] - k;
        const auto j = index_in(psi.lune, q + l);
        if (!j) continue;
        add_pair<Scalar>(ctx, q + l, true, q + k, false, Scalar(-(phi.c[i] * psi.c[*j])), v, out);
    }
    return out;
}

template <class Scalar>
FockVector<Scalar> Ops<Scalar>::pair_sum(const std::vector<LatticeVec>& qs, const LatticeVec& a, const LatticeVec& b,
                                         const FockVector<Scalar>& v) const
{
    FockVector<Scalar> out;
    for (const auto& q : qs) add_pair<Scalar>(ctx, q + a, true, q + b, false, Scalar(1), v, out);
    return out;
}

// ---------------------------------------------------------------- states

template <class Scalar>
std::vector<FockVector<Scalar>> random_states(const Context& ctx, std::mt19937_64& rng, int count, int box,
                                              int max_pairs, int max_terms)
{
    std::vector<LatticeVec> outside;
    for (int x = -box; x <= box; ++x)
        for (int y = -box; y <= box; ++y)
            for (int z = -box; z <= box; ++z) {
                const LatticeVec p{x, y, z};
                if (!ctx.in_ball(p)) outside.push_back(p);
            }
    std::sort(outside.begin(), outside.end(), canonical_less);
    const auto& inside = ctx.ball().points;
    // modes next to the surface first, so low-lying excitations are common
    const auto near = static_cast<std::size_t>(
        std::count_if(outside.begin(), outside.end(), [&](const LatticeVec& p) { return p.norm_sq() <= 2 * (inf_outside_norm(ctx.radius())); }));
    std::uniform_int_distribution<int> npairs(1, std::max(1, max_pairs)), nterms(1, max_terms);
    std::uniform_int_distribution<std::size_t> pick_far(0, outside.size() - 1), pick_near(0, near - 1),
        pick_in(0, inside.size() - 1);
    std::vector<FockVector<Scalar>> states;
    for (int s = 0; s < count; ++s) {
        FockVector<Scalar> v;
        const int terms = nterms(rng);
        for (int t = 0; t < terms; ++t) {
            BasisState st = ctx.fermi_state();
            const int pairs = (rng() % 5 == 0) ? 0 : npairs(rng);
            for (int m = 0; m < pairs; ++m) {
                const auto h = inside[pick_in(rng)];
                const auto x = outside[(rng() & 1) ? pick_near(rng) : pick_far(rng)];
                auto ih = std::lower_bound(st.begin(), st.end(), h, canonical_less);
                if (ih == st.end() || !(*ih == h)) continue;
                if (std::binary_search(st.begin(), st.end(), x, canonical_less)) continue;
                st.erase(ih);
                st.insert(std::lower_bound(st.begin(), st.end(), x, canonical_less), x);
            }
            v.add(st, random_rational<Scalar>(rng));
        }
        states.push_back(std::move(v));
    }
    return states;
}

// ---------------------------------------------------------------- checks

template <class Scalar>
CheckResult check_car(const Context& ctx, std::mt19937_64& rng, int trials, int box, double tol)
{
    CheckResult r{"car"};
    std::vector<LatticeVec> modes;
    for (int x = -box; x <= box; ++x)
        for (int y = -box; y <= box; ++y)
            for (int z = -box; z <= box; ++z) modes.push_back({x, y, z});
    std::sort(modes.begin(), modes.end(), canonical_less);
    const auto states = random_states<Scalar>(ctx, rng, trials, box);
    for (const auto& v : states) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto& p = modes[i];
            const OpFn<Scalar> cp = [&](const FockVector<Scalar>& w) { return apply_c(p, false, w); };
            const OpFn<Scalar> cpd = [&](const FockVector<Scalar>& w) { return apply_c(p, true, w); };
            for (std::size_t j = i; j < modes.size(); ++j) {
                const auto& q = modes[j];
                const OpFn<Scalar> cq = [&](const FockVector<Scalar>& w) { return apply_c(q, false, w); };
                const OpFn<Scalar> cqd = [&](const FockVector<Scalar>& w) { return apply_c(q, true, w); };
                auto d1 = anticommutator<Scalar>(cp, cqd, v);
                if (i == j) d1 -= v;
                auto d2 = anticommutator<Scalar>(cp, cq, v);
                auto d3 = anticommutator<Scalar>(cpd, cqd, v);
                r.pass = within(d1, tol, r.residual) && r.pass;
                r.pass = within(d2, tol, r.residual) && r.pass;
                r.pass = within(d3, tol, r.residual) && r.pass;
                r.cases += 3;
            }
        }
    }
    return r;
}

template <class Scalar>
CheckResult check_quasi_boson_commutator(const Context& ctx, const LatticeVec& k, const LatticeVec& l,
                                         const LuneVector<Scalar>& phi, const LuneVector<Scalar>& psi,
                                         const std::vector<FockVector<Scalar>>& states, double tol)
{
    CheckResult r{"quasi_boson_commutator"};
    const Ops<Scalar> ops{ctx};
    Scalar overlap(0);
    if (k == l)
        for (std::size_t i = 0; i < phi.c.size(); ++i) overlap += phi.c[i] * psi.c[i];
    const OpFn<Scalar> bk = [&](const FockVector<Scalar>& w) { return ops.b_vec(k, phi, false, w); };
    const OpFn<Scalar> bkd = [&](const FockVector<Scalar>& w) { return ops.b_vec(k, phi, true, w); };
    const OpFn<Scalar> bl = [&](const FockVector<Scalar>& w) { return ops.b_vec(l, psi, false, w); };
    const OpFn<Scalar> bld = [&](const FockVector<Scalar>& w) { return ops.b_vec(l, psi, true, w); };
    for (const auto& v : states) {
        auto d = commutator<Scalar>(bk, bld, v);
        d -= v.scaled(overlap);
        d -= ops.epsilon(k, l, phi, psi, v);
        r.pass = within(d, tol, r.residual) && r.pass;
        r.pass = within(commutator<Scalar>(bk, bl, v), tol, r.residual) && r.pass;
        r.pass = within(commutator<Scalar>(bkd, bld, v), tol, r.residual) && r.pass;
        r.cases += 3;
    }
    return r;
}

template <class Scalar>
CheckResult check_epsilon_sign(const Context& ctx, const LatticeVec& k, const std::vector<FockVector<Scalar>>& states)
{
    CheckResult r{"epsilon_diagonal_sign"};
    const Ops<Scalar> ops{ctx};
    const Lune L = lune(ctx.radius(), ctx.ball(), k);
    for (std::size_t i = 0; i < L.size(); ++i) {
        LuneVector<Scalar> e{L, std::vector<Scalar>(L.size(), Scalar(0))};
        e.c[i] = Scalar(1);
        for (const auto& v : states)
            for (const auto& [s, a] : v.terms) {
                const auto out = ops.epsilon(k, k, e, e, FockVector<Scalar>::basis(s));
                for (const auto& [t, b] : out.terms) {
                    // a sum of number operators: diagonal and nonpositive
                    if (!(t == s) || b > Scalar(0)) {
                        r.pass = false;
                        r.residual = std::max(r.residual, std::abs(static_cast<double>(b)));
                    }
                }
                ++r.cases;
            }
    }
    return r;
}

template <class Scalar>
CheckResult check_kinetic_commutator(const Context& ctx, const LatticeVec& k, const LatticeVec& p,
                                     const std::vector<FockVector<Scalar>>& states, double tol)
{
    CheckResult r{"kinetic_commutator"};
    const Ops<Scalar> ops{ctx};
    const Scalar two_lambda = rat<Scalar>(p.norm_sq() - (p - k).norm_sq());
    const OpFn<Scalar> H = [&](const FockVector<Scalar>& w) { return ops.hkin_prime(w); };
    const OpFn<Scalar> bd = [&](const FockVector<Scalar>& w) { return ops.b(k, p, true, w); };
    for (const auto& v : states) {
        auto d = commutator<Scalar>(H, bd, v);
        d -= bd(v).scaled(two_lambda);
        r.pass = within(d, tol, r.residual) && r.pass;
        ++r.cases;
    }
    return r;
}

template <class Scalar>
CheckResult check_D_commutators(const Context& ctx, const LatticeVec& k, const LatticeVec& l,
                                const std::vector<FockVector<Scalar>>& states, std::mt19937_64& rng, double tol)
{
    CheckResult r{"D_commutators"};
    const Ops<Scalar> ops{ctx};
    auto out = [&](const LatticeVec& q) { return !ctx.in_ball(q); };
    auto in = [&](const LatticeVec& q) { return ctx.in_ball(q); };
    const Lune Lk = lune(ctx.radius(), ctx.ball(), k);
    LuneVector<Scalar> phi{Lk, {}};
    for (std::size_t i = 0; i < Lk.size(); ++i) phi.c.push_back(random_rational<Scalar>(rng));

    for (const auto& v : states) {
        // (i) j = 1 and j = 2
        for (int j = 1; j <= 2; ++j) {
            const OpFn<Scalar> Dk_dag = [&](const FockVector<Scalar>& w) {
                return j == 1 ? ops.D1(k, true, w) : ops.D2(k, true, w);
            };
            const OpFn<Scalar> Dl = [&](const FockVector<Scalar>& w) {
                return j == 1 ? ops.D1(l, false, w) : ops.D2(l, false, w);
            };
            auto lhs = commutator<Scalar>(Dk_dag, Dl, v);
            FockVector<Scalar> rhs;
            if (j == 1) {
                // candidates from the annihilated mode; the region test does the rest
                const auto before = excited_modes(ctx, v);
                std::vector<LatticeVec> q1, q2;
                for (const auto& x : before) {
                    const LatticeVec a = x - l;
                    if (out(a) && out(a + k) && out(a + l)) q1.push_back(a);
                    const LatticeVec b = x + k;
                    if (out(b) && out(b - k) && out(b - l)) q2.push_back(b);
                }
                rhs += ops.pair_sum(q1, k, l, v);
                rhs -= ops.pair_sum(q2, -l, -k, v);
            } else {
                std::vector<LatticeVec> q1, q2;
                for (const auto& q : ctx.ball().points) {
                    if (in(q - k) && in(q - l)) q1.push_back(q);
                    if (in(q + k) && in(q + l)) q2.push_back(q);
                }
                rhs += ops.pair_sum(q1, -k, -l, v);
                rhs -= ops.pair_sum(q2, l, k, v);
            }
            r.pass = within(lhs - rhs, tol, r.residual) && r.pass;
            ++r.cases;
        }
        const OpFn<Scalar> Dl = [&](const FockVector<Scalar>& w) { return ops.D(l, false, w); };
        // (ii) both index conventions
        for (const auto& p : Lk.points) {
            for (int conv = 0; conv < 2; ++conv) {
                const LatticeVec x = conv == 0 ? p - k : p;  // p - k in the ball, or p outside
                const OpFn<Scalar> c = [&](const FockVector<Scalar>& w) { return ops.c_tilde(x, false, w); };
                auto lhs = commutator<Scalar>(c, Dl, v);
                FockVector<Scalar> rhs;
                if (conv == 0) {
                    if (in(x - l)) rhs -= ops.c_tilde(x - l, false, v);
                } else {
                    if (out(x + l)) rhs += ops.c_tilde(x + l, false, v);
                }
                r.pass = within(lhs - rhs, tol, r.residual) && r.pass;
                ++r.cases;
            }
        }
        // (iii)
        {
            const OpFn<Scalar> bd = [&](const FockVector<Scalar>& w) { return ops.b_vec(k, phi, true, w); };
            auto lhs = commutator<Scalar>(bd, Dl, v);
            FockVector<Scalar> rhs;
            for (std::size_t i = 0; i < Lk.size(); ++i) {
                const auto& q = Lk.points[i];
                if (out(q - l))
                    apply_monomial<Scalar>({ctx.tilde(q - l, true), ctx.tilde(q - k, true)}, Scalar(-phi.c[i]), v, rhs);
                if (in(q - k + l))
                    apply_monomial<Scalar>({ctx.tilde(q, true), ctx.tilde(q - k + l, true)}, phi.c[i], v, rhs);
            }
            r.pass = within(lhs - rhs, tol, r.residual) && r.pass;
            ++r.cases;
        }
        // (iv)
        {
            const OpFn<Scalar> D1k = [&](const FockVector<Scalar>& w) { return ops.D1(k, false, w); };
            const OpFn<Scalar> D2l_dag = [&](const FockVector<Scalar>& w) { return ops.D2(l, true, w); };
            r.pass = within(commutator<Scalar>(D1k, D2l_dag, v), tol, r.residual) && r.pass;
            ++r.cases;
        }
    }
    return r;
}

namespace {

// -k partner of a member through X_{-k}[-p, -q] = X_k[p, q]
template <class Scalar>
FamilyMember<Scalar> mirror(const Context& ctx, const FamilyMember<Scalar>& m)
{
    const Lune L = lune(ctx.radius(), ctx.ball(), m.k);
    const Lune Lm = lune(ctx.radius(), ctx.ball(), -m.k);
    const std::size_t n = L.size();
    std::vector<std::size_t> to(n);
    for (std::size_t i = 0; i < n; ++i) to[i] = *index_in(Lm, -L.points[i]);
    FamilyMember<Scalar> out{-m.k, Dense<Scalar>(n, n), Dense<Scalar>(n, n), Dense<Scalar>(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.A(to[i], to[j]) = m.A(i, j);
            out.C(to[i], to[j]) = m.C(i, j);
            out.S(to[i], to[j]) = m.S(i, j);
        }
    return out;
}

template <class Scalar>
LuneVector<Scalar> column(const Lune& L, const Dense<Scalar>& M, std::size_t j)
{
    LuneVector<Scalar> v{L, std::vector<Scalar>(L.size())};
    for (std::size_t i = 0; i < L.size(); ++i) v.c[i] = M(i, j);
    return v;
}

}  // namespace

template <class Scalar>
CheckResult check_quadratic_expansion(const Context& ctx, const std::vector<FamilyMember<Scalar>>& family,
                                      const std::vector<FockVector<Scalar>>& states, double tol)
{
    CheckResult r{"quadratic_expansion"};
    const Ops<Scalar> ops{ctx};
    std::map<LatticeVec, FamilyMember<Scalar>, CanonicalLess> members;
    for (const auto& m : family) {
        members.emplace(m.k, m);
        members.emplace(-m.k, mirror(ctx, m));
    }
    std::map<LatticeVec, Lune, CanonicalLess> lunes;
    for (const auto& [k, m] : members) lunes.emplace(k, lune(ctx.radius(), ctx.ball(), k));

    for (const auto& v : states) {
        FockVector<Scalar> lhs, rhs;
        for (const auto& [k, m] : members) {
            const Lune& L = lunes.at(k);
            const Lune& Lm = lunes.at(-k);
            const auto& Sm = members.at(-k).S;
            const std::size_t n = L.size();
            std::vector<std::size_t> neg(n);
            for (std::size_t i = 0; i < n; ++i) neg[i] = *index_in(Lm, -L.points[i]);
            // X_q v = b_k(C e_q) v + b_{-k}^*(S_{-k} e_{-q}) v
            std::vector<FockVector<Scalar>> X(n);
            for (std::size_t q = 0; q < n; ++q)
                X[q] = ops.b_vec(k, column(L, m.C, q), false, v) + ops.b_vec(-k, column(Lm, Sm, neg[q]), true, v);
            for (std::size_t p = 0; p < n; ++p) {
                FockVector<Scalar> Y;
                for (std::size_t q = 0; q < n; ++q) Y += X[q].scaled(Scalar(2) * m.A(p, q));
                if (Y.empty()) continue;
                lhs += ops.b_vec(k, column(L, m.C, p), true, Y);
                lhs += ops.b_vec(-k, column(Lm, Sm, neg[p]), false, Y);
            }

            const auto Ct = m.C.transpose(), St = m.S.transpose();
            const auto SAS = m.S * m.A * St;
            const auto M1 = m.C * m.A * Ct + SAS;
            const auto M2 = m.C * m.A * St + m.S * m.A * Ct;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q) {
                    const auto& pp = L.points[p];
                    const auto& qq = L.points[q];
                    if (M1(p, q) != Scalar(0)) {
                        // b_{k,p}^* b_{k,q}
                        apply_monomial<Scalar>({{pp, true}, {pp - k, false}, {qq - k, true}, {qq, false}},
                                               Scalar(2) * M1(p, q), v, rhs);
                    }
                    if (M2(p, q) != Scalar(0)) {
                        // b_{k,p} b_{-k,-q} + b_{-k,-q}^* b_{k,p}^*
                        const LatticeVec mq = -qq;
                        apply_monomial<Scalar>({{pp - k, true}, {pp, false}, {mq + k, true}, {mq, false}}, M2(p, q), v,
                                               rhs);
                        apply_monomial<Scalar>({{mq, true}, {mq + k, false}, {pp, true}, {pp - k, false}}, M2(p, q), v,
                                               rhs);
                    }
                }
            rhs += v.scaled(Scalar(2) * SAS.trace());
            for (std::size_t p = 0; p < n; ++p) {
                LuneVector<Scalar> e{L, std::vector<Scalar>(n, Scalar(0))};
                e.c[p] = Scalar(1);
                rhs += ops.epsilon(k, k, e, column(L, SAS, p), v).scaled(Scalar(2));
            }
        }
        r.pass = within(lhs - rhs, tol, r.residual) && r.pass;
        ++r.cases;
    }
    return r;
}

template <class Scalar>
CheckResult check_trace_form_lemma(std::size_t dim, int trials, std::mt19937_64& rng, double tol)
{
    CheckResult r{"trace_form_lemma"};
    const std::size_t W = 3;
    auto random_dense = [&](std::size_t n) {
        Dense<Scalar> d(n, n);
        for (auto& x : d.a) x = random_rational<Scalar>(rng);
        return d;
    };
    auto signed_permutation = [&](std::size_t n) {
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Dense<Scalar> d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, perm[i]) = (rng() & 1) ? Scalar(1) : Scalar(-1);
        return d;
    };
    for (int t = 0; t < trials; ++t) {
        std::vector<Dense<Scalar>> Q;
        for (std::size_t w = 0; w < W; ++w) Q.push_back(random_dense(dim));
        for (int variant = 0; variant < 3; ++variant) {
            Dense<Scalar> S, T;
            if (variant == 0) {
                S = T = Dense<Scalar>::identity(dim);
            } else if (variant == 1) {
                S = random_dense(dim);
                T = signed_permutation(dim);
            } else {
                S = random_dense(dim);
                T = random_dense(dim);
            }
            const auto STt = S * T.transpose();
            for (std::size_t w = 0; w < W; ++w) {
                // q(x, y)_w = x^T Q_w y
                Scalar lhs(0), rhs(0);
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t a = 0; a < dim; ++a)
                        for (std::size_t b = 0; b < dim; ++b) lhs += S(a, i) * Q[w](a, b) * T(b, i);
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t a = 0; a < dim; ++a) rhs += STt(a, i) * Q[w](a, i);
                const double d = std::abs(static_cast<double>(lhs - rhs));
                r.residual = std::max(r.residual, d);
                if constexpr (std::is_same_v<Scalar, Rational>)
                    r.pass = r.pass && lhs == rhs;
                else
                    r.pass = r.pass && d <= tol * (1.0 + std::abs(static_cast<double>(lhs)));
                ++r.cases;
            }
        }
    }
    return r;
}

template <class Scalar>
CheckResult check_e_fs(const Context& ctx, const PotentialModel& model, double beta, double tol)
{
    CheckResult r{"fermi_state_energy"};
    const auto& ball = ctx.ball();
    const auto N = static_cast<std::int64_t>(ball.N);
    auto V = [&](const LatticeVec& k) { return to_scalar<Scalar>(Rational(model.of_norm(k.norm_sq()))); };
    // |k| <= 2 k_F + 1 covers every overlapping shift
    const auto ks = ball_points(ctx.radius().four_kf_sq() + 4 * ctx.radius().floor_kf() + 2, false);
    // k-formula against the pair loop
    Scalar via_k(0), via_pairs(0);
    bool sets_ok = true;
    for (const auto& k : ks) {
        const Lune L = lune(ctx.radius(), ball, k);
        const auto deficit = N - static_cast<std::int64_t>(L.size());
        std::int64_t overlap = 0;
        for (const auto& p : ball.points)
            if (ctx.in_ball(p - k)) ++overlap;
        sets_ok = sets_ok && overlap == deficit;
        if (deficit) via_k += V(k) * rat<Scalar>(deficit);
    }
    for (const auto& p : ball.points)
        for (const auto& q : ball.points)
            if (!(p == q)) via_pairs += V(p - q);
    // <FS| sum_k V_k sum_{p,q} c_{p+k}^* c_{q-k}^* c_q c_p |FS>
    Scalar via_fock(0);
    const auto fs = FockVector<Scalar>::basis(ctx.fermi_state());
    for (const auto& k : ks) {
        FockVector<Scalar> acc;
        for (const auto& p : ball.points)
            for (const auto& q : ball.points)
                apply_monomial<Scalar>({{p + k, true}, {q - k, true}, {q, false}, {p, false}}, V(k), fs, acc);
        via_fock += acc.amplitude(ctx.fermi_state());
    }
    const double d1 = std::abs(static_cast<double>(via_k - via_pairs));
    const double d2 = std::abs(static_cast<double>(via_fock + via_k));
    r.residual = std::max(d1, d2);
    if constexpr (std::is_same_v<Scalar, Rational>)
        r.pass = sets_ok && via_k == via_pairs && via_fock == -via_k;
    else
        r.pass = sets_ok && d1 <= tol * (1.0 + std::abs(static_cast<double>(via_k))) &&
                 d2 <= tol * (1.0 + std::abs(static_cast<double>(via_k)));
    std::int64_t kin = 0;
    for (const auto& p : ball.points) kin += p.norm_sq();
    const double e_fs = static_cast<double>(kin) - std::pow(ctx.radius().kf(), -beta) /
                                                       (2.0 * two_pi_cubed) * static_cast<double>(via_k);
    r.detail = "E_FS=" + std::to_string(e_fs);
    r.cases = ks.size();
    return r;
}

template <class Scalar>
CheckResult check_number_identity(const Context& ctx, const std::vector<FockVector<Scalar>>& states, double tol)
{
    CheckResult r{"number_identity"};
    const Ops<Scalar> ops{ctx};
    for (const auto& v : states) {
        r.pass = within(ops.number_excited(v) - ops.number_holes(v), tol, r.residual) && r.pass;
        ++r.cases;
    }
    return r;
}

template <class Scalar>
CheckResult check_kinetic_forms(const Context& ctx, const std::vector<FockVector<Scalar>>& states, double tol)
{
    CheckResult r{"kinetic_zeta_forms"};
    const Ops<Scalar> ops{ctx};
    // the midpoint and one other admissible zeta
    const Rational lo(ctx.zeta_low()), hi(ctx.zeta_high());
    const Rational alt = (lo * 3 + hi) / 4;
    for (const auto& v : states) {
        const auto ref = ops.hkin_shifted(v);
        r.pass = within(ops.hkin_prime(v) - ref, tol, r.residual) && r.pass;
        r.pass = within(ops.hkin_prime(v, alt) - ref, tol, r.residual) && r.pass;
        r.cases += 2;
    }
    return r;
}

CheckResult check_trace_identity(double kF, double beta, const PotentialModel& model, const LatticeVec& k, double tol)
{
    CheckResult r{"trace_identity"};
    const auto m = build_mode<long double>(kF, beta, model, k, false);
    if (m.dim() == 0) return r;
    const MatrixX<long double> SES = m.S * m.E * m.S.transpose();
    const long double lhs = -2.0L * SES.trace();
    const long double rhs = trace_term(m);
    r.residual = static_cast<double>(std::abs(lhs - rhs));
    r.pass = r.residual <= tol * (1.0 + std::abs(static_cast<double>(rhs)));
    r.cases = 1;
    return r;
}

bool SuiteReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

void merge(CheckResult& into, const CheckResult& c)
{
    into.pass = into.pass && c.pass;
    into.residual = std::max(into.residual, c.residual);
    into.cases += c.cases;
    if (!c.pass && into.detail.empty()) into.detail = c.detail;
}

template <class Scalar>
FamilyMember<Scalar> random_member(const Context& ctx, const LatticeVec& k, std::mt19937_64& rng)
{
    const std::size_t n = lune(ctx.radius(), ctx.ball(), k).size();
    FamilyMember<Scalar> m{k, Dense<Scalar>(n, n), Dense<Scalar>(n, n), Dense<Scalar>(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m.C(i, j) = random_rational<Scalar>(rng);
            m.S(i, j) = random_rational<Scalar>(rng);
            if (j >= i) m.A(i, j) = m.A(j, i) = random_rational<Scalar>(rng);
        }
    return m;
}

template <class Scalar>
FamilyMember<Scalar> physical_member(const Context& ctx, const LatticeVec& k, double beta, const PotentialModel& model,
                                     bool A_is_E)
{
    const auto mode = build_mode<long double>(ctx.radius().kf(), beta, model, k, false);
    const auto n = static_cast<std::size_t>(mode.dim());
    FamilyMember<Scalar> m{k, Dense<Scalar>(n, n), Dense<Scalar>(n, n), Dense<Scalar>(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
            m.C(i, j) = static_cast<Scalar>(mode.C(a, b));
            m.S(i, j) = static_cast<Scalar>(mode.S(a, b));
            // E is symmetric up to roundoff; symmetrise exactly
            m.A(i, j) = A_is_E ? static_cast<Scalar>(0.5L * (mode.E(a, b) + mode.E(b, a))) : Scalar(0);
        }
    return m;
}

template <class Scalar>
SuiteReport run_suite_impl(const SuiteOptions& opt)
{
    SuiteReport rep;
    rep.arithmetic = opt.arithmetic;
    const Context ctx(opt.k_F);
    std::mt19937_64 rng(opt.seed);
    const double tol = opt.tolerance;
    const Ops<Scalar> ops{ctx};

    rep.checks.push_back(check_car<Scalar>(ctx, rng, std::max(1, opt.trials / 2), 2, tol));

    const auto states = random_states<Scalar>(ctx, rng, opt.trials, 3);
    // transfers with |k| <= 2
    const auto ks = ball_points(4, false);

    CheckResult qb{"quasi_boson_commutator"};
    for (const auto& k : ks) {
        if (ks.size() > 8 && !(orbit_representative(k) == k) && !(orbit_representative(-k) == -k)) continue;
        for (const auto& l : ks) {
            const Lune Lk = lune(ctx.radius(), ctx.ball(), k), Ll = lune(ctx.radius(), ctx.ball(), l);
            LuneVector<Scalar> phi{Lk, {}}, psi{Ll, {}};
            for (std::size_t i = 0; i < Lk.size(); ++i) phi.c.push_back(random_rational<Scalar>(rng));
            for (std::size_t i = 0; i < Ll.size(); ++i) psi.c.push_back(random_rational<Scalar>(rng));
            merge(qb, check_quasi_boson_commutator<Scalar>(ctx, k, l, phi, psi, states, tol));
        }
    }
    rep.checks.push_back(qb);

    CheckResult eps{"epsilon_diagonal_sign"};
    for (const auto& k : ks) merge(eps, check_epsilon_sign<Scalar>(ctx, k, states));
    rep.checks.push_back(eps);

    CheckResult kin{"kinetic_commutator"};
    const Context alt(opt.k_F, (Rational(ctx.zeta_low()) * 3 + Rational(ctx.zeta_high())) / 4);
    for (const auto& k : ks)
        for (const auto& p : lune(ctx.radius(), ctx.ball(), k).points) {
            merge(kin, check_kinetic_commutator<Scalar>(ctx, k, p, states, tol));
            merge(kin, check_kinetic_commutator<Scalar>(alt, k, p, states, tol));
        }
    rep.checks.push_back(kin);

    CheckResult dc{"D_commutators"};
    for (const auto& k : ks)
        for (const auto& l : ks) {
            // every k against the orbit representatives keeps the scan exhaustive up to symmetry
            if (!(orbit_representative(l) == l) && !(l == -k) && !(l == k)) continue;
            merge(dc, check_D_commutators<Scalar>(ctx, k, l, states, rng, tol));
        }
    rep.checks.push_back(dc);

    CheckResult tf{"trace_form_lemma"};
    for (std::size_t dim = 1; dim <= 8; ++dim) merge(tf, check_trace_form_lemma<Scalar>(dim, 2, rng, tol));
    rep.checks.push_back(tf);

    CheckResult qe{"quadratic_expansion"};
    const LatticeVec k1{1, 0, 0}, k2{0, 1, 1};
    {
        auto zero = random_member<Scalar>(ctx, k1, rng);
        for (auto& x : zero.A.a) x = Scalar(0);
        const auto res = check_quadratic_expansion<Scalar>(ctx, {zero}, states, tol);
        merge(qe, res);
    }
    if constexpr (std::is_same_v<Scalar, Rational>) {
        merge(qe, check_quadratic_expansion<Scalar>(ctx, {random_member<Scalar>(ctx, k1, rng)}, states, tol));
        merge(qe, check_quadratic_expansion<Scalar>(
                      ctx, {random_member<Scalar>(ctx, k1, rng), random_member<Scalar>(ctx, k2, rng)}, states, tol));
    } else {
        merge(qe, check_quadratic_expansion<Scalar>(ctx, {physical_member<Scalar>(ctx, k1, opt.beta, opt.model, true)},
                                                    states, tol));
        auto a = physical_member<Scalar>(ctx, k1, opt.beta, opt.model, false);
        auto b = physical_member<Scalar>(ctx, k2, opt.beta, opt.model, false);
        for (auto* m : {&a, &b})
            for (std::size_t i = 0; i < m->A.n; ++i)
                for (std::size_t j = i; j < m->A.n; ++j) m->A(i, j) = m->A(j, i) = random_rational<Scalar>(rng);
        merge(qe, check_quadratic_expansion<Scalar>(ctx, {a, b}, states, tol));
    }
    rep.checks.push_back(qe);

    rep.checks.push_back(check_e_fs<Scalar>(ctx, opt.model, opt.beta, tol));
    rep.checks.push_back(check_number_identity<Scalar>(ctx, random_states<Scalar>(ctx, rng, 50, 3), tol));
    rep.checks.push_back(check_kinetic_forms<Scalar>(ctx, states, tol));

    CheckResult ti{"trace_identity"};
    for (const auto& k : ks) merge(ti, check_trace_identity(opt.k_F, opt.beta, opt.model, k, 1e-12));
    rep.checks.push_back(ti);
    (void)ops;
    return rep;
}

}  // namespace

SuiteReport run_suite(const SuiteOptions& opt)
{
    if (!(opt.k_F > 0.0 && opt.k_F <= 2.0)) throw ValidationError("the Fock oracle runs only for k_F <= 2");
    if (opt.arithmetic == Arithmetic::rational) return run_suite_impl<Rational>(opt);
    return run_suite_impl<long double>(opt);
}

#define GBCORR_FOCK_INSTANTIATE(S)                                                                                   \
    template struct Ops<S>;                                                                                          \
    template std::vector<FockVector<S>> random_states<S>(const Context&, std::mt19937_64&, int, int, int, int);     \
    template CheckResult check_car<S>(const Context&, std::mt19937_64&, int, int, double);                           \
    template CheckResult check_quasi_boson_commutator<S>(const Context&, const LatticeVec&, const LatticeVec&,       \
                                                         const LuneVector<S>&, const LuneVector<S>&,                 \
                                                         const std::vector<FockVector<S>>&, double);                 \
    template CheckResult check_epsilon_sign<S>(const Context&, const LatticeVec&, const std::vector<FockVector<S>>&); \
    template CheckResult check_kinetic_commutator<S>(const Context&, const LatticeVec&, const LatticeVec&,           \
                                                     const std::vector<FockVector<S>>&, double);                     \
    template CheckResult check_D_commutators<S>(const Context&, const LatticeVec&, const LatticeVec&,                \
                                                const std::vector<FockVector<S>>&, std::mt19937_64&, double);        \
    template CheckResult check_quadratic_expansion<S>(const Context&, const std::vector<FamilyMember<S>>&,           \
                                                      const std::vector<FockVector<S>>&, double);                    \
    template CheckResult check_trace_form_lemma<S>(std::size_t, int, std::mt19937_64&, double);                      \
    template CheckResult check_e_fs<S>(const Context&, const PotentialModel&, double, double);                       \
    template CheckResult check_number_identity<S>(const Context&, const std::vector<FockVector<S>>&, double);        \
    template CheckResult check_kinetic_forms<S>(const Context&, const std::vector<FockVector<S>>&, double);

GBCORR_FOCK_INSTANTIATE(Rational)
GBCORR_FOCK_INSTANTIATE(long double)

}  // namespace gbcorr::fock
