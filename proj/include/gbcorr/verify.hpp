#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbcorr/estimates.hpp"
#include "gbcorr/onebody.hpp"
#include "gbcorr/potential.hpp"

namespace gbcorr {

struct VerifyOptions {
    std::vector<double> kf_list{1.0, 2.0, 3.0, 4.0};
    double beta = 1.0;
    PotentialModel model = PotentialModel::coulomb(1.0);
    double epsilon = 0.1;
    int threads = 1;
    double trend_limit = 1.0;   // largest tolerated log-log slope of a ratio across the sweep
    double orbit_factor = 2.0;  // orbits with |k| <= orbit_factor k_F
    int instances = 100;        // random rank-one instances
    std::uint64_t seed = 7;
};

struct SuiteResult {
    std::string suite;
    std::vector<BoundCheck> rows;
    bool pass() const;
    std::vector<std::string> failing() const;
};

SuiteResult verify_bounds(const VerifyOptions& opt);
SuiteResult verify_onebody(const VerifyOptions& opt);

// one diagonal-plus-rank-one instance h, v > 0
struct RankOneReport {
    double fourth_root_error = 0.0;  // max entry, integral vs eigen, both signs
    double sandwich_violation = 0.0;  // largest amount by which any bound fails (<= 0 when all hold)
    double cs_violation = 0.0;
};
RankOneReport rank_one_instance(const VectorX<double>& h, const VectorX<double>& v, double quad_tol = 1e-10);

// per-mode dense identities; returns the largest relative defect of each family
struct ModeIdentityReport {
    double e_squared = 0.0;        // E^2 against h^2 + 2 (h^1/2 v)(h^1/2 v)^T, relative
    double e_minus_h = 0.0;        // -min eig(E - h), clamped at 0
    double c_s_roots = 0.0;        // C - S and C + S against their roots
    double c_s_inverse = 0.0;      // (C - S)(C + S)^T - 1
    double reconstruction = 0.0;   // h + P and P from C, S, E
    double trace_range = 0.0;      // distance of tr(E - h - P) outside [-|L| g, 0]
    double trace_binned = 0.0;     // dense against secular trace
    double element_bounds = 0.0;   // entry bounds on C - 1 and S, relative
};
ModeIdentityReport mode_identities(const ModeOperators<double>& m);

}  // namespace gbcorr
