#pragma once

#include <stdexcept>
#include <string>

namespace gbcorr {

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double partial = 0.0, double err = 0.0)
        : std::runtime_error(what), partial_value(partial), error_estimate(err) {}
    double partial_value;
    double error_estimate;
};

}  // namespace gbcorr
