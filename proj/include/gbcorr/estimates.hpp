#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gbcorr/correlation.hpp"
#include "gbcorr/lattice.hpp"
#include "gbcorr/onebody.hpp"
#include "gbcorr/potential.hpp"

namespace gbcorr {

struct BoundCheck {
    std::string name;
    double k_F = 0.0, beta = 1.0, epsilon = 0.1;
    double lhs = 0.0, rhs_envelope = 0.0, ratio = 0.0;
    bool pass = true;
    std::string context;
};

// lhs/rhs, 0 when both vanish, +inf when only rhs does
double bound_ratio(double lhs, double rhs);

// sum_{p in A} 1 / ||p|^2 - zeta|
double kinetic_sum(const FermiRadius& r, const std::vector<LatticeVec>& A);
double kinetic_sum_fermi_ball(double kF);
double kinetic_sum_lune(double kF, const LatticeVec& k);
// A = closed ball of radius R, counted through r3 shells
double kinetic_sum_ball(double kF, double R);
// |B(0, 2 k_F)|, the admissible size of A
std::int64_t kinetic_set_limit(const FermiRadius& r);

struct LuneStats {
    std::int64_t size = 0;
    double sum_inv_lambda = 0.0;
    double ratio_inv = 0.0;   // sum_inv_lambda / k_F
    double ratio_size = 0.0;  // |L_k| / (k_F^2 min(|k|, k_F))
};
LuneStats lune_stats(double kF, const LatticeVec& k);
LuneStats lune_stats(const FermiRadius& r, const SpectralBins& bins, const LatticeVec& k);

// weights ||p|^2 - k_F^2| for the two index conventions (p in L_k, p in L_k - k)
struct VarphiPsiNorms {
    double max_phi = 0.0, sum_max_phi = 0.0;
    double max_psi = 0.0, sum_max_psi = 0.0;
    double scale = 0.0;  // k_F^{1-2beta} V^_k^2
    double ratio(double x) const { return scale > 0.0 ? x / scale : 0.0; }
};
VarphiPsiNorms varphi_psi_norms(const ModeOperators<double>& m, double kF, double beta, double vk);
VarphiPsiNorms varphi_psi_norms(double kF, double beta, const PotentialModel& model, const LatticeVec& k);
// same from the bin reduction, no dense matrices
VarphiPsiNorms varphi_psi_norms(const BinnedMode& bm, const Lune& L, double kF, double beta, double vk);

// sup_{p,q} |X_pq| (lambda_p + lambda_q) over the lune, from the binned reduction
struct ElementRatios {
    double s = 0.0;          // |S_pq| (lp+lq) / (V^ k_F^-beta)
    double c = 0.0;          // |C_pq - d_pq| (lp+lq) / (V^ k_F^-beta)
    double s_refined = 0.0;  // |S_pq - g/(lp+lq)| (lp+lq) / (V^^2 k_F^{1-2beta})
};
ElementRatios element_ratios(const BinnedMode& bm, double kF, double beta, double vk);
ElementRatios element_ratios(double kF, double beta, const PotentialModel& model, const LatticeVec& k);

// sum_{0 < |k| <= R} f(|k|) and sum_{|k| > R} f(|k|); exact lattice sums up to a
// fixed radius, shell integrals beyond
double radial_sum_within(const std::function<double(double)>& f, double R, double support = 1e300);
double radial_sum_beyond(const std::function<double(double)>& f, double R, double support = 1e300);

struct ErrorBudget {
    double k_F = 0.0, beta = 1.0, epsilon = 0.1;
    double radius_S = 0.0, radius_S_prime = 0.0;
    double sqrt_v2_outside_S = 0.0;     // sqrt(sum_{k not in S} V^2)
    double v_sum_S_scaled = 0.0;        // k_F^{-1/2} sum_S V^
    double v3_sum = 0.0;                // sum V^3
    double sqrt_v2_min = 0.0;           // sqrt(sum V^2 min(|k|, k_F))
    double v_over_k2_outside = 0.0;     // sum_{k not in S'} V^ |k|^-2
    double sqrt_v2_k_outside = 0.0;     // sqrt(sum_{k not in S'} V^2 |k|^{-(1-eps)})
    double v_sum_S_prime_scaled = 0.0;  // k_F^{-2} sum_{S'} V^
    double v_sup_outside = 0.0;         // sup_{p outside B_F} V^_p
    // envelope coefficients; each bound reads coef * (H' + k_F) (+ constant)
    double envelope_B = 0.0, envelope_B_const = 0.0;
    double envelope_C = 0.0;
    double envelope_S = 0.0;  // coefficient of H'
    double final_exponent = 0.0;
    double final_coefficient = 0.0;  // k_F^{-1/6 + 2(1-beta) + eps}
    // all envelopes evaluated on the Fermi state (H' = 0)
    double fermi_state_envelope() const;
};

ErrorBudget error_budget(double kF, double beta, const PotentialModel& model, double epsilon = 0.1,
                         double radius_S = -1.0, double radius_S_prime = -1.0);

struct BosLowerEnvelope {
    double doubled_bos = 0.0;   // -E~_bos with V^ -> 2 V^, as a nonnegative number
    double pair_bound = 0.0;    // k_F^{-2beta}/(2pi)^6 sum V^2 sum_{p,q} 1/(l_p + l_q)
    double stats_bound = 0.0;   // same with |L_k| sum 1/l in place of the pair sum
    double scaling_ratio = 0.0; // stats_bound / k_F^{3-2beta+eps}
    bool chain_holds = false;
};
BosLowerEnvelope bos_lower_envelope(double kF, double beta, const PotentialModel& model, double Kmax,
                                    double epsilon = 0.1, double rel_tol = 1e-10, int threads = 1);

}  // namespace gbcorr
