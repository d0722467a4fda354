#include "gbcorr/potential.hpp"

#include <cmath>
#include <sstream>

#include "gbcorr/errors.hpp"

namespace gbcorr {

double PotentialModel::radial(double r) const
{
    if (!(r > 0.0)) throw ValidationError("V^_0 is outside the model domain");
    switch (kind) {
    case PotentialKind::coulomb: return coupling / (r * r);
    case PotentialKind::sharp_cutoff: return r <= param * (1.0 + 1e-15) ? coupling / (r * r) : 0.0;
    case PotentialKind::exponential: return coupling * std::exp(-param * (r - 1.0)) / (r * r);
    case PotentialKind::power_law: return coupling / std::pow(r, param);
    }
    return 0.0;
}

double PotentialModel::of_norm(std::int64_t n) const
{
    if (n <= 0) throw ValidationError("V^_0 is outside the model domain");
    const double nd = static_cast<double>(n);
    switch (kind) {
    case PotentialKind::coulomb: return coupling / nd;
    case PotentialKind::sharp_cutoff:
        // exact on the lattice: |k| <= R  <=>  |k|^2 <= R^2
        return nd <= param * param * (1.0 + 1e-14) ? coupling / nd : 0.0;
    case PotentialKind::exponential: return coupling * std::exp(-param * (std::sqrt(nd) - 1.0)) / nd;
    case PotentialKind::power_law: return coupling / std::pow(nd, 0.5 * param);
    }
    return 0.0;
}

double PotentialModel::support_radius() const
{
    if (kind == PotentialKind::sharp_cutoff) return param;
    return std::numeric_limits<double>::infinity();
}

PotentialKind parse_potential_kind(const std::string& s)
{
    if (s == "coulomb") return PotentialKind::coulomb;
    if (s == "sharp-cutoff-coulomb" || s == "sharp-cutoff") return PotentialKind::sharp_cutoff;
    if (s == "exponential-decay" || s == "exponential") return PotentialKind::exponential;
    if (s == "power-law") return PotentialKind::power_law;
    throw ValidationError("unknown potential.kind '" + s + "'");
}

std::string to_string(PotentialKind k)
{
    switch (k) {
    case PotentialKind::coulomb: return "coulomb";
    case PotentialKind::sharp_cutoff: return "sharp-cutoff-coulomb";
    case PotentialKind::exponential: return "exponential-decay";
    case PotentialKind::power_law: return "power-law";
    }
    return "?";
}

std::string PotentialModel::name() const { return to_string(kind); }

std::string PotentialModel::descriptor() const
{
    std::ostringstream os;
    os.precision(17);
    os << name() << "(g=" << coupling;
    if (kind == PotentialKind::sharp_cutoff) os << ",R=" << param;
    if (kind == PotentialKind::exponential) os << ",a=" << param;
    if (kind == PotentialKind::power_law) os << ",s=" << param;
    os << ")";
    return os.str();
}

double v_hat(const PotentialModel& m, const LatticeVec& k)
{
    if (k.is_zero()) throw ValidationError("v_hat: k = 0 is outside the model domain");
    return m.of_norm(k.norm_sq());
}

namespace {

LatticeVec witness(std::int64_t n)
{
    const auto m = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) + 1;
    for (std::int64_t a = 0; a <= m; ++a)
        for (std::int64_t b = 0; b <= a; ++b)
            for (std::int64_t c = 0; c <= b; ++c)
                if (a * a + b * b + c * c == n) return {a, b, c};
    return {};
}

}  // namespace

PotentialValidation validate(const PotentialModel& m, double K_scan)
{
    PotentialValidation rep;
    const auto nmax = max_norm_within(K_scan);
    const auto counts = r3_table(nmax);
    auto fail = [&](std::int64_t n, const std::string& why) {
        if (!rep.valid) return;
        rep.valid = false;
        rep.first_violation = witness(n);
        std::ostringstream os;
        os << why << " at |k|^2 = " << n;
        rep.message = os.str();
    };
    if (!(m.coupling >= 0.0) || !std::isfinite(m.coupling)) {
        rep.valid = false;
        rep.message = "coupling must be a nonnegative finite number";
        return rep;
    }

    double prev = std::numeric_limits<double>::infinity();
    double inner_max = 0.0, outer_max = 0.0;
    for (std::int64_t n = 1; n <= nmax; ++n) {
        if (counts[static_cast<std::size_t>(n)] == 0) continue;
        const double v = m.of_norm(n);
        if (!std::isfinite(v) || v < 0.0) fail(n, "V^ negative or non-finite");
        if (v > prev * (1.0 + 1e-14)) fail(n, "V^ not radially decreasing");
        prev = v;
        const double cv = v * static_cast<double>(n);
        rep.empirical_cv = std::max(rep.empirical_cv, cv);
        if (4 * n <= nmax)
            inner_max = std::max(inner_max, cv);
        else
            outer_max = std::max(outer_max, cv);
        if (!std::isnan(m.declared_cv) && cv > m.declared_cv * (1.0 + 1e-12)) fail(n, "V^ exceeds declared C_V |k|^-2");
    }
    // growth of V^|k|^2 across the scan means no finite C_V
    if (rep.valid && nmax >= 4 && outer_max > inner_max * (1.0 + 1e-12)) {
        rep.valid = false;
        rep.message = "V^ |k|^2 grows with |k|: no constant C_V dominates";
        std::int64_t worst = nmax;
        for (std::int64_t n = nmax; n >= 1; --n)
            if (counts[static_cast<std::size_t>(n)] && m.of_norm(n) * static_cast<double>(n) == outer_max) {
                worst = n;
                break;
            }
        rep.first_violation = witness(worst);
    }
    if (rep.valid) {
        std::ostringstream os;
        os.precision(17);
        os << "valid; empirical C_V = " << rep.empirical_cv << " (monotone over all lattice norms <= " << nmax << ")";
        rep.message = os.str();
    }
    return rep;
}

}  // namespace gbcorr
