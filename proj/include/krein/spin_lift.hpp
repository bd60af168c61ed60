// SPDX-License-Identifier: Apache-2.0
//
// Lifts of pseudo-orthogonal maps to Spin(g) on spinor space, their operator
// norms for the n2 scalar product, and the spectra of Ad of the lift.
#pragma once

#include "krein/clifford_rep.hpp"
#include "krein/common.hpp"
#include "krein/doppler.hpp"
#include "krein/krein_core.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace krein
{

//---------------------------------------------------------------------------//
// LIFTS
//---------------------------------------------------------------------------//

/*!
 * Spinor generator of the so(g) element B:
 * sigma = (1/4) sum_{mu,nu} (B g^{-1})^{mu nu} gamma_mu gamma_nu,
 * so that [sigma, gamma(v)] = gamma(B v).
 */
inline CMat bivector_generator(GammaRep const& rep, RMat const& b)
{
    int const n = rep.dim();
    if (b.rows() != n || b.cols() != n)
        fail_input("generator has wrong dimensions");
    CMat out = CMat::Zero(rep.dim_spinor, rep.dim_spinor);
    for (int mu = 0; mu < n; ++mu)
    {
        for (int nu = 0; nu < n; ++nu)
        {
            double const raised = b(mu, nu) * rep.metric_signs[nu];
            if (raised == 0.0)
                continue;
            out += Complex(0.25 * raised) * (rep.gammas[mu] * rep.gammas[nu]);
        }
    }
    return out;
}

/// max_nu ||A gamma_nu A^{-1} - gamma(M e_nu)|| / max(1, ||M||).
inline double ad_residual(GammaRep const& rep, CMat const& a,
                          CMat const& a_inv, RMat const& m)
{
    double worst = 0.0;
    for (int nu = 0; nu < rep.dim(); ++nu)
    {
        CMat const lhs = a * rep.gammas[nu] * a_inv;
        CMat const rhs = clifford_vector(rep, m.col(nu));
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst / std::max(1.0, m.norm());
}

struct SpinElement
{
    CMat value;
    CMat inverse;
    double ad_residual = 0.0;
    int convention = +1;  //!< sign applied to the bivector generator
};

/*!
 * exp of the spinor generator of B, checked against Ad compatibility with
 * exp(B). Falls back to the opposite generator normalization once.
 */
inline SpinElement spin_exp(GammaRep const& rep, RMat const& b)
{
    RMat const m = b.exp();
    CMat const sigma = bivector_generator(rep, b);
    SpinElement best;
    best.ad_residual = -1.0;
    for (int convention : {+1, -1})
    {
        CMat const gen = double(convention) * sigma;
        CMat const value = gen.exp();
        CMat const inverse = CMat(-gen).exp();
        double const res = ad_residual(rep, value, inverse, m);
        if (best.ad_residual < 0 || res < best.ad_residual)
            best = {value, inverse, res, convention};
        if (res <= tol::ad_compat)
            return best;
    }
    if (best.ad_residual > tol::ad_fail)
        fail_consistency("spin lift fails Ad compatibility (residual "
                         + std::to_string(best.ad_residual) + ")");
    return best;
}

struct SpinLift
{
    PolarParts source;
    CMat tildeL;
    CMat tildeL_inv;
    RMat bivector_coeffs;  //!< B with L = exp(B), in so(g), g2-symmetric
    double ad_residual = 0.0;
    int convention = +1;
};

/// Real logarithm of L: log of its positive spectrum in the g2 frame.
inline RMat log_positive(PolarParts const& polar)
{
    RMat const& v = polar.eigvecs_hat;
    RVec const logs = polar.spectrum_L.array().log().matrix();
    RMat const bhat = v * logs.asDiagonal() * v.transpose();
    return polar.frame2 * bhat * polar.frame2_inv;
}

inline SpinLift lift(GammaRep const& rep, PolarParts const& polar)
{
    if (polar.L.rows() != rep.dim())
        fail_input("polar decomposition dimension does not match "
                   "representation");
    RMat const g = rep.metric();
    double const lnorm = std::max(1.0, polar.L.norm());
    if ((polar.L.transpose() * g * polar.L - g).norm() > 1e-8 * lnorm * lnorm)
        fail_input("L is not pseudo-orthogonal for the representation's "
                   "metric");

    SpinLift sl;
    sl.source = polar;
    sl.bivector_coeffs = log_positive(polar);
    auto const elem = spin_exp(rep, sl.bivector_coeffs);
    sl.tildeL = elem.value;
    sl.tildeL_inv = elem.inverse;
    sl.ad_residual = elem.ad_residual;
    sl.convention = elem.convention;
    return sl;
}

/// Residual of B^T g + g B = 0 and of g2 B = (g2 B)^T.
struct BivectorResiduals
{
    double g_antisymmetry = 0;
    double g2_symmetry = 0;
};

inline BivectorResiduals bivector_residuals(RMat const& g,
                                            Splitting const& split2,
                                            RMat const& b)
{
    RMat const gb = g * b;
    RMat const g2b = split2.g_s * b;
    return {(b.transpose() * g + gb).norm(),
            (g2b - g2b.transpose()).norm()};
}

//---------------------------------------------------------------------------//
// SPECTRA
//---------------------------------------------------------------------------//

/// All products lambda_{i1}..lambda_{ik} over subsets (2^n values), sorted.
inline std::vector<double> subset_products(RVec const& spectrum)
{
    Eigen::Index const n = spectrum.size();
    std::vector<double> out(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < out.size(); ++mask)
    {
        double prod = 1.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            if (mask & (std::size_t{1} << i))
                prod *= spectrum(i);
        }
        out[mask] = prod;
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Sorted values with neighbours closer than rel_tol merged.
inline std::vector<double> dedup_sorted(std::vector<double> const& sorted,
                                        double rel_tol = tol::spectrum)
{
    std::vector<double> out;
    for (double x : sorted)
    {
        if (out.empty()
            || std::abs(x - out.back())
                   > rel_tol * std::max(std::abs(x), std::abs(out.back())))
            out.push_back(x);
    }
    return out;
}

/// max_i |a_i - b_i| / |a_i| for equally long sorted lists.
inline double sorted_relative_defect(std::vector<double> const& a,
                                     std::vector<double> const& b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double const scale = std::max(std::abs(a[i]), 1e-300);
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

namespace detail
{
inline std::vector<double> real_sorted(CVec const& ev, double* max_imag)
{
    std::vector<double> out(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i)
    {
        out[i] = ev(i).real();
        if (max_imag != nullptr)
        {
            *max_imag = std::max(*max_imag, std::abs(ev(i).imag())
                                                / std::abs(ev(i)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace detail

/// Largest vector-space dimension for which Ad is diagonalized explicitly.
inline constexpr int kMaxNumericalAdDim = 6;

struct AdSpectrumReport
{
    std::vector<double> enumerated;   //!< subset products, with multiplicity
    std::vector<double> distinct;     //!< enumerated, deduplicated
    std::vector<double> numerical;    //!< eig of X -> L~ X L~^{-1}; n <= 6
    std::vector<double> quotients;    //!< mu_i / mu_j over eig(L~)
    double enumeration_defect = 0.0;  //!< enumerated vs numerical
    double quotient_defect = 0.0;     //!< enumerated vs quotients
    double max_imag = 0.0;            //!< relative imaginary parts seen
    double radius = 1.0;              //!< r(Ad_{L~})
    bool numerical_checked = false;
};

/*!
 * Spectrum of Ad_{L~} three ways: subset products of the spectrum of L,
 * eigenvalues of the conjugation map on End(S) (n <= 6), and quotients of
 * eigenvalues of L~.
 */
inline AdSpectrumReport ad_spectrum(SpinLift const& sl,
                                    RVec const& spectrum_L)
{
    AdSpectrumReport rep;
    rep.enumerated = subset_products(spectrum_L);
    rep.distinct = dedup_sorted(rep.enumerated);
    rep.radius = rep.enumerated.back();

    Eigen::ComplexEigenSolver<CMat> eig_lift(sl.tildeL, false);
    CVec const mu = eig_lift.eigenvalues();
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        for (Eigen::Index j = 0; j < mu.size(); ++j)
            rep.quotients.push_back(std::abs(mu(i) / mu(j)));
    std::sort(rep.quotients.begin(), rep.quotients.end());
    rep.quotient_defect
        = sorted_relative_defect(rep.enumerated, rep.quotients);

    int const n = static_cast<int>(spectrum_L.size());
    if (n <= kMaxNumericalAdDim)
    {
        // vec(A X A^{-1}) = (A^{-T} kron A) vec(X)
        CMat const ad = Eigen::kroneckerProduct(
            CMat(sl.tildeL_inv.transpose()), sl.tildeL);
        Eigen::ComplexEigenSolver<CMat> eig_ad(ad, false);
        rep.numerical = detail::real_sorted(eig_ad.eigenvalues(),
                                            &rep.max_imag);
        rep.enumeration_defect
            = sorted_relative_defect(rep.enumerated, rep.numerical);
        rep.numerical_checked = true;
        rep.radius = rep.numerical.back();
    }
    if (rep.enumeration_defect > tol::ad_fail
        || rep.quotient_defect > tol::ad_fail)
    {
        fail_consistency("Ad spectrum mismatch between enumeration and "
                         "numerical eigenvalues");
    }
    return rep;
}

struct LiftNormReport
{
    double lift_norm = 1.0;              //!< ||L~||_{n2}
    double base_norm = 1.0;              //!< ||Lambda||_{g2} = r(L)
    double ad_spectral_radius = 1.0;     //!< r(Ad_{L~})
    double product_formula_value = 1.0;  //!< (prod_{lambda > 1} lambda)^{1/2}
    double lower_bound = 1.0;            //!< base_norm^{1/2}
    double upper_bound = 1.0;            //!< base_norm^{min(p,q)/2}
    double normality_residual = 0.0;
    int min_pq = 0;
};

inline LiftNormReport lift_norm(KreinProductSpace const& space,
                                FundSym const& fs2, SpinLift const& sl)
{
    LiftNormReport rep;
    RVec const& spec = sl.source.spectrum_L;
    rep.base_norm = std::max(1.0, spec(0));
    rep.min_pq = std::min(space.rep.sig.p, space.rep.sig.q);
    rep.lower_bound = std::sqrt(rep.base_norm);
    rep.upper_bound = std::pow(rep.base_norm, 0.5 * rep.min_pq);

    CMat const x = to_orthonormal(space, fs2, sl.tildeL);
    Eigen::JacobiSVD<CMat> svd(x);
    rep.lift_norm = svd.singularValues()(0);
    rep.normality_residual
        = (x * x.adjoint() - x.adjoint() * x).norm()
          / std::max(1.0, rep.lift_norm * rep.lift_norm);

    double prod = 1.0;
    for (Eigen::Index i = 0; i < spec.size(); ++i)
        prod *= spec(i) > 1.0 ? spec(i) : 1.0;
    rep.product_formula_value = std::sqrt(prod);
    rep.ad_spectral_radius = ad_spectrum(sl, spec).radius;
    return rep;
}

//---------------------------------------------------------------------------//
// PSEUDO-UNITARY SPECTRA
//---------------------------------------------------------------------------//

struct PairingReport
{
    double unitarity_residual = 0.0;  //!< ||M^+ G M - G|| / (||G|| ||M||^2)
    double pairing_defect = 0.0;      //!< max relative |z' - 1/conj(z)|
    std::vector<Complex> eigenvalues;
};

/*!
 * Matches the spectrum of a G-unitary M against its image under
 * z -> 1/conj(z), multiplicities included (greedy nearest matching).
 */
template <typename Scalar>
PairingReport pseudo_unitary_spectrum_check(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> const& m,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> const& gram)
{
    if (m.rows() != m.cols() || gram.rows() != m.rows()
        || gram.cols() != m.cols())
        fail_input("pseudo-unitary check: dimension mismatch");
    CMat const mc = m.template cast<Complex>();
    CMat const gc = gram.template cast<Complex>();

    PairingReport rep;
    double const mn = std::max(1.0, mc.norm());
    rep.unitarity_residual = (mc.adjoint() * gc * mc - gc).norm()
                             / (std::max(1.0, gc.norm()) * mn * mn);
    if (rep.unitarity_residual > 1e-8)
        fail_input("matrix is not pseudo-unitary for the given form");

    Eigen::ComplexEigenSolver<CMat> eig(mc, false);
    CVec const ev = eig.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());

    std::vector<bool> taken(rep.eigenvalues.size(), false);
    for (Complex z : rep.eigenvalues)
    {
        Complex const target = 1.0 / std::conj(z);
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < rep.eigenvalues.size(); ++j)
        {
            if (taken[j])
                continue;
            double const d = std::abs(rep.eigenvalues[j] - target);
            if (d < best_d)
            {
                best_d = d;
                best = j;
            }
        }
        taken[best] = true;
        rep.pairing_defect = std::max(
            rep.pairing_defect, best_d / std::max(1.0, std::abs(target)));
    }
    return rep;
}

}  // namespace krein
