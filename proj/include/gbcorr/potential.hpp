#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "gbcorr/lattice.hpp"

namespace gbcorr {

enum class PotentialKind { coulomb, sharp_cutoff, exponential, power_law };

struct PotentialModel {
    PotentialKind kind = PotentialKind::coulomb;
    double coupling = 1.0;
    double param = 0.0;  // R, a or s
    double declared_cv = std::numeric_limits<double>::quiet_NaN();

    static PotentialModel coulomb(double g = 1.0) { return {PotentialKind::coulomb, g, 0.0}; }
    static PotentialModel sharp_cutoff(double g, double R) { return {PotentialKind::sharp_cutoff, g, R}; }
    static PotentialModel exponential(double g, double a) { return {PotentialKind::exponential, g, a}; }
    static PotentialModel power_law(double g, double s) { return {PotentialKind::power_law, g, s}; }

    PotentialModel scaled(double factor) const
    {
        PotentialModel m = *this;
        m.coupling *= factor;
        return m;
    }

    // V^ as a function of |k|
    double radial(double r) const;
    // V^ as a function of |k|^2; the lattice-facing entry point
    double of_norm(std::int64_t n) const;
    // |k| beyond which V^ vanishes (infinity when it never does)
    double support_radius() const;

    std::string name() const;
    std::string descriptor() const;
};

PotentialKind parse_potential_kind(const std::string& s);
std::string to_string(PotentialKind k);

double v_hat(const PotentialModel& m, const LatticeVec& k);

struct PotentialValidation {
    bool valid = true;
    double empirical_cv = 0.0;
    std::string message;
    std::optional<LatticeVec> first_violation;
};

PotentialValidation validate(const PotentialModel& m, double K_scan);

}  // namespace gbcorr
