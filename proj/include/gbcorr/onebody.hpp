#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbcorr/errors.hpp"
#include "gbcorr/lattice.hpp"
#include "gbcorr/potential.hpp"

namespace gbcorr {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double two_pi_cubed = 8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;

// squared entry of v_k: V^_k k_F^-beta / (2 (2 pi)^3)
double mode_coupling(double kF, double beta, const PotentialModel& m, const LatticeVec& k);
double mode_coupling_norm(double kF, double beta, const PotentialModel& m, std::int64_t knorm);

template <class Scalar>
struct SpectralPowers {
    VectorX<Scalar> eigenvalues;  // of M
    MatrixX<Scalar> half;         // M^{1/2}
    MatrixX<Scalar> quarter;      // M^{1/4}
    MatrixX<Scalar> minus_quarter;
    MatrixX<Scalar> minus_three_quarter;
};

// powers of a symmetric matrix that is positive definite up to roundoff
template <class Derived>
SpectralPowers<typename Derived::Scalar> spectral_powers(const Eigen::MatrixBase<Derived>& M)
{
    using Scalar = typename Derived::Scalar;
    using std::pow;
    using std::sqrt;
    SpectralPowers<Scalar> out;
    const Eigen::Index n = M.rows();
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(M);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    VectorX<Scalar> ev = es.eigenvalues();
    const Scalar scale = M.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (ev(i) < Scalar(-1e-10) * scale) throw NumericalError("negative eigenvalue in E^2");
        if (ev(i) < Scalar(0)) ev(i) = Scalar(0);
    }
    if (ev.minCoeff() == Scalar(0)) throw NumericalError("singular E^2: inverse roots undefined");
    out.eigenvalues = ev;
    const auto& Q = es.eigenvectors();
    auto apply = [&](auto f) {
        VectorX<Scalar> d(n);
        for (Eigen::Index i = 0; i < n; ++i) d(i) = f(ev(i));
        return MatrixX<Scalar>(Q * d.asDiagonal() * Q.transpose());
    };
    out.half = apply([](Scalar x) { return sqrt(x); });
    out.quarter = apply([](Scalar x) { return sqrt(sqrt(x)); });
    out.minus_quarter = apply([](Scalar x) { return Scalar(1) / sqrt(sqrt(x)); });
    out.minus_three_quarter = apply([](Scalar x) { return Scalar(1) / (sqrt(x) * sqrt(sqrt(x))); });
    return out;
}

// E, E^{+-1/2}, C, S and eta for diagonal h and rank-one P = v v^T
template <class Scalar>
struct OneBodyCore {
    VectorX<Scalar> h, v, w;
    MatrixX<Scalar> E, E_half, E_inv_half, C, S;
    VectorX<Scalar> eta;
    Scalar v_h_inv_v = 0;
    VectorX<Scalar> e2_eigenvalues;
};

template <class Scalar>
OneBodyCore<Scalar> one_body_core(const VectorX<Scalar>& h, const VectorX<Scalar>& v, const VectorX<Scalar>& w)
{
    using std::sqrt;
    OneBodyCore<Scalar> c;
    c.h = h;
    c.v = v;
    c.w = w;
    const Eigen::Index n = h.size();
    if (n == 0) return c;
    const VectorX<Scalar> hs = h.array().sqrt().matrix();
    const VectorX<Scalar> his = hs.cwiseInverse();
    const VectorX<Scalar> u = hs.cwiseProduct(v);
    MatrixX<Scalar> M = Scalar(2) * u * u.transpose();
    M.diagonal() += h.cwiseProduct(h);
    const auto P = spectral_powers(M);
    c.e2_eigenvalues = P.eigenvalues;
    c.E = P.half;
    c.E_half = P.quarter;
    c.E_inv_half = P.minus_quarter;
    const MatrixX<Scalar> a = his.asDiagonal() * c.E_half;
    const MatrixX<Scalar> b = hs.asDiagonal() * c.E_inv_half;
    c.C = Scalar(0.5) * (a + b);
    c.S = Scalar(0.5) * (a - b);
    c.eta = P.minus_three_quarter * hs.cwiseProduct(w);
    c.v_h_inv_v = v.cwiseProduct(v).cwiseQuotient(h).sum();
    return c;
}

template <class Scalar>
struct ModeOperators {
    LatticeVec k;
    Lune lune;
    Scalar g = 0;
    bool in_S = false;
    VectorX<Scalar> h_diag, v;
    MatrixX<Scalar> E, E_half, E_inv_half, C, S;
    VectorX<Scalar> eta;
    Scalar v_h_inv_v = 0;

    bool empty() const { return lune.empty(); }
    Eigen::Index dim() const { return h_diag.size(); }
};

template <class Scalar>
ModeOperators<Scalar> build_mode_from_lune(Lune L, double g, bool in_S)
{
    using std::sqrt;
    ModeOperators<Scalar> m;
    m.k = L.k;
    m.g = Scalar(g);
    m.in_S = in_S;
    const auto n = static_cast<Eigen::Index>(L.size());
    m.h_diag.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) m.h_diag(i) = Scalar(L.two_lambdas[static_cast<std::size_t>(i)]) / Scalar(2);
    m.v = VectorX<Scalar>::Constant(n, sqrt(Scalar(g)));
    m.lune = std::move(L);
    if (n == 0) return m;
    const VectorX<Scalar> w = VectorX<Scalar>::Constant(n, Scalar(g));
    auto core = one_body_core<Scalar>(m.h_diag, m.v, w);
    m.E = std::move(core.E);
    m.E_half = std::move(core.E_half);
    m.E_inv_half = std::move(core.E_inv_half);
    m.C = std::move(core.C);
    m.S = std::move(core.S);
    m.eta = in_S ? core.eta : VectorX<Scalar>::Zero(n);
    m.v_h_inv_v = core.v_h_inv_v;
    return m;
}

template <class Scalar>
ModeOperators<Scalar> build_mode(double kF, double beta, const PotentialModel& model, const LatticeVec& k, bool in_S)
{
    if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in (0,1]");
    return build_mode_from_lune<Scalar>(lune(kF, k), mode_coupling(kF, beta, model, k), in_S);
}

enum class EMethod { eigen, rank_one_integral };

// (A + w w^T)^{+-1/4} for diagonal A > 0 through the resolvent integral
MatrixX<double> fourth_root_rank_one(const VectorX<double>& a_diag, const VectorX<double>& w, bool plus_quarter,
                                     double abs_tol = 1e-10);

struct ERoots {
    MatrixX<double> E, E_half, E_inv_half;
};
ERoots e_roots(const VectorX<double>& h, const VectorX<double>& v, EMethod method, double abs_tol = 1e-10);

template <class Scalar>
MatrixX<Scalar> e_matrix(const ModeOperators<Scalar>& m, EMethod method)
{
    if (method == EMethod::eigen || m.dim() == 0) return m.E;
    return e_roots(m.h_diag.template cast<double>(), m.v.template cast<double>(), method).E.template cast<Scalar>();
}

// tr(E - h - P)
template <class Scalar>
Scalar trace_term(const ModeOperators<Scalar>& m)
{
    if (m.dim() == 0) return Scalar(0);
    Scalar s = 0;
    for (Eigen::Index i = 0; i < m.dim(); ++i) s += m.E(i, i) - m.h_diag(i);
    return s - Scalar(m.dim()) * m.g;
}

struct EtaEnergy {
    double direct = 0.0;
    double closed_form = 0.0;
};

template <class Scalar>
EtaEnergy eta_e_eta(const ModeOperators<Scalar>& m)
{
    if (!m.in_S) throw ValidationError("eta_e_eta requires a mode in S");
    EtaEnergy r;
    if (m.dim() == 0) return r;
    r.direct = static_cast<double>(m.eta.dot(m.E * m.eta));
    const double X = static_cast<double>(m.v_h_inv_v);
    r.closed_form = static_cast<double>(m.g) * X / (1.0 + 2.0 * X);
    return r;
}

// lune points grouped by equal lambda; the operators above act on each
// group's orthogonal complement of the constant vector as functions of lambda alone
struct SpectralBins {
    std::vector<std::int64_t> two_mu;
    std::vector<double> mu;
    std::vector<double> count;
    std::int64_t total = 0;

    std::size_t size() const { return two_mu.size(); }
    bool empty() const { return two_mu.empty(); }
    // bin of a given 2*lambda, -1 if absent
    std::int64_t index_of(std::int64_t two_lambda) const
    {
        const auto off = two_lambda - offset_;
        if (off < 0 || off >= static_cast<std::int64_t>(lookup_.size())) return -1;
        return lookup_[static_cast<std::size_t>(off)];
    }
    void build_lookup();

private:
    std::int64_t offset_ = 0;
    std::vector<std::int32_t> lookup_;
};

SpectralBins spectral_bins(const Lune& L);
// histogram without materialising the lune
SpectralBins lune_bins(const FermiRadius& r, const FermiBall& ball, const LatticeVec& k);

struct BinnedMode {
    LatticeVec k;
    double g = 0.0;
    SpectralBins bins;
    OneBodyCore<double> core;  // reduced operators in the normalised bin basis
};

BinnedMode build_binned_mode(const LatticeVec& k, SpectralBins bins, double g);
// back to the lune basis; complement is the value taken on each bin's complement
MatrixX<double> lift(const BinnedMode& bm, const Lune& L, const MatrixX<double>& reduced,
                     const VectorX<double>& complement);

// eigenvalues of diag(d) + z z^T with w = z^2, as offsets from the sorted distinct d
std::vector<double> secular_shifts(const std::vector<double>& d, const std::vector<double>& w);
// tr(E - h - P) from the reduced eigenvalues only
double trace_term_binned(const SpectralBins& bins, double g);

}  // namespace gbcorr
