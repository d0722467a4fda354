#include "gbcorr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gbcorr/summation.hpp"

namespace gbcorr {

const double GaussKronrod15::x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.0};
const double GaussKronrod15::wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double GaussKronrod15::wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

namespace {

struct Segment {
    double a, b, value, error;
};

struct ByError {
    bool operator()(const Segment& l, const Segment& r) const
    {
        if (l.error != r.error) return l.error < r.error;
        return l.a > r.a;
    }
};

Segment gk15(const BatchIntegrand& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double t[15], y[15];
    t[0] = c;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * GaussKronrod15::x[i];
        t[1 + 2 * i] = c - dx;
        t[2 + 2 * i] = c + dx;
    }
    f(t, y, 15);
    double k = y[0] * GaussKronrod15::wk[7];
    double g = y[0] * GaussKronrod15::wg[3];
    for (int i = 0; i < 7; ++i) {
        const double s = y[1 + 2 * i] + y[2 + 2 * i];
        k += GaussKronrod15::wk[i] * s;
        if (i % 2 == 1) g += GaussKronrod15::wg[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadResult integrate_batched(const BatchIntegrand& f, const std::vector<double>& bp, const QuadOptions& opt)
{
    QuadResult res;
    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(bp[i + 1] > bp[i])) continue;
        auto s = gk15(f, bp[i], bp[i + 1]);
        res.evaluations += 15;
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int intervals = static_cast<int>(heap.size());
    while (!heap.empty() && err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (intervals >= opt.max_intervals) {
            res.converged = false;
            break;
        }
        const Segment s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b)) {
            res.converged = false;
            heap.push(s);
            break;
        }
        const auto l = gk15(f, s.a, m), r = gk15(f, m, s.b);
        res.evaluations += 30;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    NeumaierSum v, e;
    for (const auto& s : segs) {
        v.add(s.value);
        e.add(s.error);
    }
    res.value = v.value();
    res.error = e.value();
    return res;
}

QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& bp, const QuadOptions& opt)
{
    return integrate_batched(
        [&](const double* t, double* y, int n) {
            for (int i = 0; i < n; ++i) y[i] = f(t[i]);
        },
        bp, opt);
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt)
{
    return integrate(f, std::vector<double>{a, b}, opt);
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opt)
{
    auto g = [&](double u) {
        const double om = 1.0 - u;
        const double t = a + u / om;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v / (om * om);
    };
    return integrate(g, std::vector<double>{0.0, 0.5, 0.9, 0.99, 1.0}, opt);
}

namespace {

struct MatSegment {
    double a, b;
    Eigen::MatrixXd value;
    double error;
};

MatSegment gk15_rank_one(const RankOneIntegrand& f, double a, double b)
{
    const Eigen::Index n = f.dim;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Eigen::MatrixXd R(n, 15);
    Eigen::VectorXd wk(15), wdiff(15);
    Eigen::VectorXd r(n);
    int col = 0;
    auto node = [&](double u, double wkr, double wgr) {
        const double om = 1.0 - u;
        const double t = f.scale * u / om;
        const double coef = f.eval(t, r) * f.scale / (om * om);
        R.col(col) = r;
        wk(col) = wkr * coef * h;
        wdiff(col) = (wkr - wgr) * coef * h;
        ++col;
    };
    node(c, GaussKronrod15::wk[7], GaussKronrod15::wg[3]);
    for (int i = 0; i < 7; ++i) {
        const double wgi = (i % 2 == 1) ? GaussKronrod15::wg[i / 2] : 0.0;
        const double dx = h * GaussKronrod15::x[i];
        node(c - dx, GaussKronrod15::wk[i], wgi);
        node(c + dx, GaussKronrod15::wk[i], wgi);
    }
    MatSegment s{a, b, R * wk.asDiagonal() * R.transpose(), 0.0};
    s.error = (R * wdiff.asDiagonal() * R.transpose()).cwiseAbs().maxCoeff();
    return s;
}

}  // namespace

MatrixQuadResult integrate_rank_one(const RankOneIntegrand& f, double abs_tol, int max_intervals)
{
    MatrixQuadResult res;
    std::vector<MatSegment> segs;
    const double bp[] = {0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 1.0};
    for (int i = 0; i + 1 < 7; ++i) {
        segs.push_back(gk15_rank_one(f, bp[i], bp[i + 1]));
        res.evaluations += 15;
    }
    auto total_err = [&]() {
        double e = 0.0;
        for (const auto& s : segs) e += s.error;
        return e;
    };
    while (total_err() > abs_tol) {
        if (static_cast<int>(segs.size()) >= max_intervals) {
            res.converged = false;
            break;
        }
        auto it = std::max_element(segs.begin(), segs.end(),
                                   [](const MatSegment& l, const MatSegment& r) { return l.error < r.error; });
        const double a = it->a, b = it->b, m = 0.5 * (a + b);
        *it = gk15_rank_one(f, a, m);
        segs.push_back(gk15_rank_one(f, m, b));
        res.evaluations += 30;
    }
    std::sort(segs.begin(), segs.end(), [](const MatSegment& l, const MatSegment& r) { return l.a < r.a; });
    res.value = Eigen::MatrixXd::Zero(f.dim, f.dim);
    for (const auto& s : segs) res.value += s.value;
    res.error = total_err();
    return res;
}

}  // namespace gbcorr
