#include <doctest.h>

#include <random>

#include "gbcorr/errors.hpp"
#include "gbcorr/fock.hpp"

using namespace gbcorr;
using namespace gbcorr::fock;

namespace {

using V = FockVector<Rational>;

V excite(const Context& ctx, const LatticeVec& hole, const LatticeVec& particle)
{
    BasisState s;
    for (const auto& p : ctx.fermi_state())
        if (!(p == hole)) s.push_back(p);
    s.push_back(particle);
    std::sort(s.begin(), s.end(), canonical_less);
    return V::basis(s);
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("creation and annihilation signs")
{
    const BasisState s{{0, 0, 0}, {1, 0, 0}};
    auto r = apply_c({0, 0, 1}, true, s);
    REQUIRE(r);
    // (0,0,1) sorts between the two occupied modes
    CHECK(r->second == -1);
    CHECK(r->first.size() == 3);
    CHECK_FALSE(apply_c({1, 0, 0}, true, s));
    CHECK_FALSE(apply_c({2, 0, 0}, false, s));
    auto a = apply_c({1, 0, 0}, false, s);
    REQUIRE(a);
    CHECK(a->second == -1);
    CHECK(a->first == BasisState{{0, 0, 0}});
}

TEST_CASE("anticommutator on explicit states")
{
    const V v = V::basis({{0, 0, 0}, {0, 1, 0}});
    const LatticeVec p{1, 0, 0}, q{0, 1, 0};
    // {c_p, c_q^*} = 0 for p != q
    V x = apply_c(p, false, apply_c(q, true, v)) + apply_c(q, true, apply_c(p, false, v));
    CHECK(x.empty());
    // {c_q, c_q^*} = 1
    V y = apply_c(q, false, apply_c(q, true, v)) + apply_c(q, true, apply_c(q, false, v));
    CHECK(y.size() == 1);
    CHECK(y.amplitude(v.terms.begin()->first) == Rational(1));
}

TEST_CASE("context and zeta")
{
    const Context ctx(1.0);
    CHECK(ctx.fermi_state().size() == 7);
    CHECK(ctx.zeta() == Rational(3, 2));
    CHECK(ctx.zeta_low() == 1);
    CHECK(ctx.zeta_high() == 2);
    CHECK_THROWS_AS(Context(1.0, Rational(3)), ValidationError);
    CHECK_NOTHROW(Context(1.0, Rational(5, 4)));
    CHECK(ctx.tilde({0, 0, 0}, false).dagger);
    CHECK_FALSE(ctx.tilde({2, 0, 0}, false).dagger);
}

TEST_CASE("single pair excitation")
{
    const Context ctx(1.0);
    const Ops<Rational> ops{ctx};
    const V fs = V::basis(ctx.fermi_state());
    CHECK(ops.hkin_prime(fs).empty());
    CHECK(ops.hkin_shifted(fs).empty());
    CHECK(ops.number_excited(fs).empty());
    CHECK(ops.number_holes(fs).empty());

    // b_{k,p}^* on the Fermi state moves p - k to p
    const LatticeVec k{1, 0, 0}, p{2, 0, 0};
    const V ex = ops.b(k, p, true, fs);
    REQUIRE(ex.size() == 1);
    const V ref = excite(ctx, {1, 0, 0}, p);
    CHECK((ex - ref).empty() != (ex + ref).empty());
    CHECK(ops.b(k, p, false, fs).empty());
    // 4 - 1 either way
    const V h = ops.hkin_shifted(ex);
    CHECK(h.amplitude(ex.terms.begin()->first) == Rational(3) * ex.terms.begin()->second);
    const V hp = ops.hkin_prime(ex);
    CHECK(hp.amplitude(ex.terms.begin()->first) == Rational(3) * ex.terms.begin()->second);
    const V ne = ops.number_excited(ex);
    CHECK(ne.amplitude(ex.terms.begin()->first) == ex.terms.begin()->second);
}

TEST_CASE("individual checks pass in rational mode")
{
    const Context ctx(1.0);
    std::mt19937_64 rng(99);
    const auto states = random_states<Rational>(ctx, rng, 3);
    CHECK(states.size() == 3);
    for (const auto& s : states) CHECK_FALSE(s.empty());
    CHECK(check_car<Rational>(ctx, rng, 3, 2, 0.0).pass);
    CHECK(check_kinetic_commutator<Rational>(ctx, {1, 0, 0}, {1, 1, 0}, states, 0.0).pass);
    CHECK(check_epsilon_sign<Rational>(ctx, {1, 0, 0}, states).pass);
    CHECK(check_number_identity<Rational>(ctx, states, 0.0).pass);
    CHECK(check_kinetic_forms<Rational>(ctx, states, 0.0).pass);
    CHECK(check_trace_form_lemma<Rational>(4, 3, rng, 0.0).pass);
    const auto efs = check_e_fs<Rational>(ctx, PotentialModel::coulomb(1.0), 1.0, 0.0);
    CHECK(efs.pass);
    CHECK(check_trace_identity(1.0, 1.0, PotentialModel::coulomb(1.0), {1, 0, 0}, 1e-12).pass);
}

TEST_CASE("whole suite, both arithmetics")
{
    for (auto a : {Arithmetic::rational, Arithmetic::extended}) {
        SuiteOptions o;
        o.arithmetic = a;
        o.trials = 2;
        const auto rep = run_suite(o);
        CHECK(rep.all_pass());
        for (const auto& c : rep.checks) {
            CHECK_MESSAGE(c.pass, c.name << " " << c.detail);
            // the per-mode trace identity is a floating-point matrix check in both modes
            if (a == Arithmetic::rational && c.name != "trace_identity") CHECK(c.residual == 0.0);
            else CHECK(c.residual <= 1e-10);
            CHECK(c.cases > 0);
        }
    }
    SuiteOptions big;
    big.k_F = 3.0;
    CHECK_THROWS_AS(run_suite(big), ValidationError);
}

}
