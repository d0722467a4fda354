#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gbcorr {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

struct QuadOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
};

// evaluates f at n abscissae in one call
using BatchIntegrand = std::function<void(const double* t, double* y, int n)>;

// adaptive Gauss-Kronrod 7/15 over consecutive breakpoints
QuadResult integrate_batched(const BatchIntegrand& f, const std::vector<double>& breakpoints,
                             const QuadOptions& opt = {});
QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opt = {});
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});
// [a, inf) through t = a + u/(1-u)
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opt = {});

// integral over [0, inf) of coef(t) r(t) r(t)^T, mapped by t = u/(1-u); abs_tol is per entry
struct RankOneIntegrand {
    // fills r, returns the scalar coefficient
    std::function<double(double t, Eigen::VectorXd& r)> eval;
    Eigen::Index dim = 0;
    double scale = 1.0;  // t = scale * u/(1-u)
};

struct MatrixQuadResult {
    Eigen::MatrixXd value;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

MatrixQuadResult integrate_rank_one(const RankOneIntegrand& f, double abs_tol, int max_intervals = 2000);

struct GaussKronrod15 {
    static const double x[8];
    static const double wk[8];
    static const double wg[4];
};

}  // namespace gbcorr
