#include <doctest.h>

#include <cmath>

#include "gbcorr/errors.hpp"
#include "gbcorr/potential.hpp"

using namespace gbcorr;

TEST_SUITE("potential") {

TEST_CASE("model values")
{
    const auto c = PotentialModel::coulomb(2.0);
    CHECK(c.of_norm(1) == 2.0);
    CHECK(c.of_norm(4) == 0.5);
    CHECK(c.radial(2.0) == doctest::Approx(0.5));
    CHECK(v_hat(c, {1, 1, 0}) == 1.0);

    const auto sc = PotentialModel::sharp_cutoff(1.0, 2.0);
    CHECK(sc.of_norm(4) == 0.25);
    CHECK(sc.of_norm(5) == 0.0);
    CHECK(sc.support_radius() == 2.0);
    CHECK(std::isinf(c.support_radius()));

    const auto ex = PotentialModel::exponential(1.0, 0.5);
    CHECK(ex.of_norm(1) == doctest::Approx(1.0));
    CHECK(ex.of_norm(4) == doctest::Approx(std::exp(-0.5) / 4.0));

    const auto pl = PotentialModel::power_law(3.0, 3.0);
    CHECK(pl.of_norm(4) == doctest::Approx(3.0 / 8.0));
    CHECK(pl.radial(2.0) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("radial and lattice entry points agree")
{
    for (auto m : {PotentialModel::coulomb(1.0), PotentialModel::exponential(0.7, 1.3), PotentialModel::power_law(1.0, 2.5),
                   PotentialModel::sharp_cutoff(1.0, 3.5)})
        for (std::int64_t n = 1; n < 40; ++n) CHECK(m.of_norm(n) == doctest::Approx(m.radial(std::sqrt(double(n)))));
}

TEST_CASE("domain errors")
{
    const auto c = PotentialModel::coulomb();
    CHECK_THROWS_AS(c.of_norm(0), ValidationError);
    CHECK_THROWS_AS(c.radial(0.0), ValidationError);
    CHECK_THROWS_AS(v_hat(c, {0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(parse_potential_kind("yukawa"), ValidationError);
    CHECK(parse_potential_kind("coulomb") == PotentialKind::coulomb);
    CHECK(parse_potential_kind("sharp-cutoff-coulomb") == PotentialKind::sharp_cutoff);
    CHECK(parse_potential_kind("exponential-decay") == PotentialKind::exponential);
    CHECK(parse_potential_kind("power-law") == PotentialKind::power_law);
    for (auto k : {PotentialKind::coulomb, PotentialKind::sharp_cutoff, PotentialKind::exponential, PotentialKind::power_law})
        CHECK(parse_potential_kind(to_string(k)) == k);
}

TEST_CASE("validation accepts the standard models")
{
    for (auto m : {PotentialModel::coulomb(1.0), PotentialModel::coulomb(0.0), PotentialModel::sharp_cutoff(1.0, 3.0),
                   PotentialModel::exponential(1.0, 0.2), PotentialModel::power_law(1.0, 2.0),
                   PotentialModel::power_law(1.0, 4.0)}) {
        const auto v = validate(m, 20.0);
        CHECK_MESSAGE(v.valid, m.descriptor() << ": " << v.message);
        CHECK(v.empirical_cv <= m.coupling * 1.0000001);
    }
}

TEST_CASE("validation rejects slow decay and negative couplings")
{
    const auto slow = validate(PotentialModel::power_law(1.0, 1.5), 20.0);
    CHECK_FALSE(slow.valid);
    CHECK(slow.first_violation.has_value());

    CHECK_FALSE(validate(PotentialModel::coulomb(-1.0), 10.0).valid);

    auto declared = PotentialModel::coulomb(2.0);
    declared.declared_cv = 1.0;
    const auto d = validate(declared, 10.0);
    CHECK_FALSE(d.valid);
    REQUIRE(d.first_violation.has_value());
    CHECK(d.first_violation->norm_sq() == 1);
}

TEST_CASE("scaling the coupling")
{
    const auto m = PotentialModel::exponential(1.5, 0.3).scaled(2.0);
    CHECK(m.coupling == 3.0);
    CHECK(m.param == 0.3);
    CHECK(m.descriptor().find("exponential-decay") == 0);
}

}
