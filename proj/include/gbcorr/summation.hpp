#pragma once

#include <cmath>
#include <vector>

namespace gbcorr {

// Kahan-Babuska-Neumaier
class NeumaierSum {
public:
    void add(double x)
    {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    NeumaierSum& operator+=(double x)
    {
        add(x);
        return *this;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

template <class Range>
double neumaier_sum(const Range& xs)
{
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace gbcorr
