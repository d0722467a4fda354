#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gbcorr/lattice.hpp"
#include "gbcorr/onebody.hpp"
#include "gbcorr/potential.hpp"

namespace gbcorr {

// log(1+x) - x
double F(double x);

double lindhard_sum(const Lune& L, double t);
double lindhard_sum(const SpectralBins& bins, double t);

struct BosTerm {
    double value = 0.0;
    double error = 0.0;
    double tail = 0.0;  // analytic part beyond T
    int evaluations = 0;
};

// (1/pi) int_0^inf F(2 g Lambda(t)) dt
BosTerm bos_term(const SpectralBins& bins, double g, double rel_tol = 1e-11);
BosTerm bos_term(double kF, double beta, const PotentialModel& model, const LatticeVec& k, double rel_tol = 1e-11);

// sum_{|k| > K} f(|k|) by a shell integral from the radius whose ball holds as many
// lattice points as |k| <= K
double continuum_tail(const std::function<double(double)>& f, double K, double support = 1e300);

struct OrbitRow {
    LatticeVec k;
    std::int64_t multiplicity = 0;
    std::size_t lune_size = 0;
    double bos_term = 0.0;
    double bos_error = 0.0;
    double trace_term = 0.0;
    double ex_term = 0.0;
    double second_order = 0.0;
};

struct BosSum {
    double value = 0.0;
    double trace_value = 0.0;
    double second_order = 0.0;
    double tail_estimate = 0.0;
    double quad_error = 0.0;
    std::vector<OrbitRow> rows;
};

struct BosOptions {
    double rel_tol = 1e-11;
    bool with_trace = true;
    bool with_second_order = false;
    int threads = 1;
};

BosSum e_corr_bos(double kF, double beta, const PotentialModel& model, double Kmax, const BosOptions& opt = {});

struct ExSum {
    double value = 0.0;
    double tail_estimate = 0.0;
    std::vector<OrbitRow> rows;
};

// sum_{p,q in L_k} V^(p+q-k) / (lambda_p + lambda_q)
double exchange_inner(const FermiRadius& r, const FermiBall& ball, const PotentialModel& model, const LatticeVec& k);
ExSum e_corr_ex(double kF, double beta, const PotentialModel& model, double Kmax, int threads = 1);

// sum_{p,q in L_k} 1/(lambda_p + lambda_q), from bins
double pair_inverse_sum(const SpectralBins& bins);
double second_order_term(const SpectralBins& bins, double weight);
double second_order(double kF, double beta, const PotentialModel& model, double Kmax, int threads = 1);
// -(1/4(2pi)^6) sum_{|k|>K} (V^ k_F^-beta)^2 N^2/|k|^2
double second_order_tail(double kF, double beta, const PotentialModel& model, double Kmax);
double exchange_tail(double kF, double beta, const PotentialModel& model, double Kmax);

struct EB6Result {
    double value = 0.0;
    double e_ex = 0.0;
    double deviation = 0.0;
    double sum_v_cubed = 0.0;  // sum over |k| <= Kmax of V^_k^3
    std::vector<OrbitRow> rows;  // ex_term holds the per-k E_B6 contribution
};

EB6Result eb6_exchange(double kF, double beta, const PotentialModel& model, double Kmax, int threads = 1);

struct CorrelationReport {
    double k_F = 0.0;
    double beta = 1.0;
    std::string model;
    double K_max_bos = 0.0, K_max_ex = 0.0;
    double e_bos_quadrature = 0.0, e_bos_trace = 0.0, e_ex = 0.0, e_second_order = 0.0, e_b6 = 0.0;
    double tail_estimate_bos = 0.0, tail_estimate_ex = 0.0;
    double quad_error = 0.0;
    bool beta_in_theorem_range = true;
    std::vector<OrbitRow> per_orbit;  // union over the bosonic orbit set
};

struct CorrelationOptions {
    double kmax_factor_bos = 4.0;
    double kmax_factor_ex = 2.0;
    double quad_rel_tol = 1e-11;
    bool with_trace = true;
    bool with_eb6 = true;
    int threads = 1;
};

CorrelationReport compute_correlation(double kF, double beta, const PotentialModel& model,
                                      const CorrelationOptions& opt);

}  // namespace gbcorr
