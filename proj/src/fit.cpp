#include "gbcorr/fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "gbcorr/errors.hpp"

namespace gbcorr {

std::string to_string(FitModel m) { return m == FitModel::klogk ? "a*k*log(k)+b*k" : "a*k^c"; }

double AsymptoticFit::predict(double t) const
{
    if (model == FitModel::klogk) return coefficients[0] * t * std::log(t) + coefficients[1] * t;
    return coefficients[0] * std::pow(t, coefficients[1]);
}

double AsymptoticFit::last_relative_residual() const
{
    if (x.empty()) return 0.0;
    std::size_t i = 0;
    for (std::size_t j = 1; j < x.size(); ++j)
        if (x[j] > x[i]) i = j;
    return y[i] != 0.0 ? std::abs(residuals[i] / y[i]) : std::abs(residuals[i]);
}

namespace {

void check_points(const std::vector<double>& x, const std::vector<double>& y, std::size_t need)
{
    if (x.size() != y.size()) throw ValidationError("fit: x and y differ in length");
    if (x.size() < need)
        throw ValidationError("fit: needs at least " + std::to_string(need) + " points, got " + std::to_string(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0) || !std::isfinite(y[i])) throw ValidationError("fit: x must be positive and y finite");
}

// column-scaled QR so the rank test does not depend on units
Eigen::VectorXd solve_ls(Eigen::MatrixXd A, const Eigen::VectorXd& b)
{
    Eigen::VectorXd scale(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        scale(j) = A.col(j).norm();
        if (scale(j) == 0.0) throw NumericalError("fit: rank-deficient design");
        A.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < A.cols()) throw NumericalError("fit: rank-deficient design");
    return qr.solve(b).cwiseQuotient(scale);
}

double r_squared(const Eigen::VectorXd& b, const Eigen::VectorXd& fitted)
{
    const double mean = b.mean();
    const double ss_tot = (b.array() - mean).square().sum();
    const double ss_res = (b - fitted).squaredNorm();
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

}  // namespace

AsymptoticFit fit_klogk(const std::vector<double>& x, const std::vector<double>& y)
{
    check_points(x, y, min_fit_points);
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = x[static_cast<std::size_t>(i)];
        A(i, 0) = t * std::log(t);
        A(i, 1) = t;
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = solve_ls(A, b);
    AsymptoticFit f;
    f.model = FitModel::klogk;
    f.x = x;
    f.y = y;
    f.coefficients = {c(0), c(1)};
    const Eigen::VectorXd fitted = A * c;
    for (Eigen::Index i = 0; i < n; ++i) f.residuals.push_back(b(i) - fitted(i));
    f.r_squared = r_squared(b, fitted);
    return f;
}

AsymptoticFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    check_points(x, y, min_fit_points);
    const double sign = y.front() < 0.0 ? -1.0 : 1.0;
    for (double v : y)
        if (!(v * sign > 0.0)) throw ValidationError("fit: power law needs nonzero values of one sign");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = std::log(x[static_cast<std::size_t>(i)]);
        b(i) = std::log(sign * y[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd c = solve_ls(A, b);
    AsymptoticFit f;
    f.model = FitModel::power_law;
    f.x = x;
    f.y = y;
    f.coefficients = {sign * std::exp(c(0)), c(1)};
    for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - f.predict(x[i]));
    f.r_squared = r_squared(b, A * c);
    return f;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    check_points(x, y, 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) throw ValidationError("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 1e-14 * std::max(1.0, n * sxx))) throw NumericalError("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

}  // namespace gbcorr
