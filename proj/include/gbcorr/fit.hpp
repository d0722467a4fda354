#pragma once

#include <string>
#include <vector>

namespace gbcorr {

enum class FitModel { klogk, power_law };
std::string to_string(FitModel m);

struct AsymptoticFit {
    FitModel model = FitModel::klogk;
    std::vector<double> x, y;
    // klogk: {a, b} in a k log k + b k;  power_law: {a, c} in a k^c
    std::vector<double> coefficients;
    std::vector<double> residuals;  // y - fitted, one per point
    double r_squared = 0.0;

    double predict(double x) const;
    // |residual| / |y| at the largest x
    double last_relative_residual() const;
};

inline constexpr std::size_t min_fit_points = 4;

// least squares; ValidationError below min_fit_points (or on bad data),
// NumericalError on a rank-deficient design
AsymptoticFit fit_klogk(const std::vector<double>& x, const std::vector<double>& y);
// log-log least squares of |y|; y must not change sign
AsymptoticFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// plain log-log slope for internal scans, any n >= 2
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gbcorr
