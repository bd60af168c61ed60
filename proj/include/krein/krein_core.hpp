// SPDX-License-Identifier: Apache-2.0
//
// Pointwise Krein products on spinor space, fundamental symmetries attached
// to splittings, the scalar products they induce, and operator norms.
#pragma once

#include "krein/clifford_rep.hpp"
#include "krein/common.hpp"
#include "krein/doppler.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace krein
{

struct KreinProductSpace
{
    GammaRep rep;
    SpinorMetric metric;

    CMat const& H() const { return metric.H; }
    int dim_spinor() const { return rep.dim_spinor; }
};

inline KreinProductSpace make_krein_space(GammaRep rep)
{
    SpinorMetric h = build_spinor_metric(rep);
    return {std::move(rep), std::move(h)};
}

inline KreinProductSpace make_krein_space(Signature const& sig)
{
    return make_krein_space(build_gamma_rep(sig));
}

/// Which subspace the frame product of a fundamental symmetry runs over.
enum class FrameSide
{
    negative,  //!< pseudo-orthonormal basis of V
    positive,  //!< pseudo-orthonormal basis of V^perp
};

inline char const* to_string(FrameSide side)
{
    return side == FrameSide::negative ? "V" : "V_perp";
}

struct FundSym
{
    CMat n;
    Splitting source;
    int r_phase = 0;
    FrameSide side = FrameSide::negative;
};

struct FundSymResiduals
{
    double involution = 0;       //!< ||n^2 - I||
    double krein_selfadj = 0;    //!< ||H n - (H n)^+||
    double min_gram_eigen = 0;   //!< smallest eigenvalue of H n
};

inline FundSymResiduals fundsym_residuals(KreinProductSpace const& space,
                                          CMat const& n)
{
    FundSymResiduals res;
    CMat const id = space.rep.identity();
    res.involution = (n * n - id).norm();
    CMat const hn = space.H() * n;
    res.krein_selfadj = (hn - hn.adjoint()).norm();
    Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(hn));
    res.min_gram_eigen = eig.eigenvalues()(0);
    return res;
}

namespace detail
{
inline void check_matches(KreinProductSpace const& space, Splitting const& sp)
{
    if (sp.dim() != space.rep.dim())
        fail_input("splitting dimension does not match representation");
    RMat const g = space.rep.metric();
    if ((sp.g - g).cwiseAbs().maxCoeff() > 1e-12)
        fail_input("splitting metric differs from the representation's "
                   "diagonal metric");
}

inline CMat frame_product(GammaRep const& rep, RMat const& basis)
{
    CMat out = rep.identity();
    for (Eigen::Index j = 0; j < basis.cols(); ++j)
        out = out * clifford_vector(rep, basis.col(j));
    return out;
}
}  // namespace detail

/*!
 * Fundamental symmetry n = i^r v_1 ... v_k of a splitting.
 *
 * Candidates run over a pseudo-orthonormal basis of V and of V^perp with
 * r = 0..3; exactly one of them up to sign satisfies n^2 = 1, H n Hermitian
 * and H n positive definite.
 */
inline FundSym fundamental_symmetry(KreinProductSpace const& space,
                                    Splitting const& split)
{
    detail::check_matches(space, split);
    struct Pass
    {
        CMat n;
        int r;
        FrameSide side;
    };
    std::vector<Pass> passing;
    CMat const id = space.rep.identity();
    for (FrameSide side : {FrameSide::negative, FrameSide::positive})
    {
        RMat const& basis = side == FrameSide::negative ? split.basis_V
                                                        : split.basis_perp;
        CMat const base = detail::frame_product(space.rep, basis);
        for (int r = 0; r < 4; ++r)
        {
            CMat const n = i_pow(r) * base;
            double const scale = std::max(1.0, n.norm());
            auto const res = fundsym_residuals(space, n);
            if (res.involution > tol::involution * scale * scale
                || res.krein_selfadj > tol::involution * scale)
                continue;
            if (res.min_gram_eigen <= tol::involution)
                continue;
            bool duplicate = false;
            for (auto const& other : passing)
                duplicate = duplicate
                            || (other.n - n).norm()
                                   <= tol::involution * scale;
            if (!duplicate)
                passing.push_back({n, r, side});
        }
    }
    if (passing.size() != 1)
    {
        fail_consistency(std::to_string(passing.size())
                         + " essentially distinct fundamental symmetry "
                           "candidates for signature "
                         + space.rep.sig.str());
    }
    return {passing.front().n, split, passing.front().r,
            passing.front().side};
}

namespace detail
{
inline void check_spinor(KreinProductSpace const& space, CVec const& psi)
{
    if (psi.size() != space.dim_spinor())
        fail_input("spinor has dimension " + std::to_string(psi.size())
                   + ", expected " + std::to_string(space.dim_spinor()));
}
}  // namespace detail

/// (psi, phi) = psi^+ H phi.
inline Complex krein_product(KreinProductSpace const& space, CVec const& psi,
                             CVec const& phi)
{
    detail::check_spinor(space, psi);
    detail::check_spinor(space, phi);
    return psi.dot(space.H() * phi);
}

/// Gram matrix G = H n of the scalar product <psi, phi>_n = (psi, n phi).
inline CMat gram_matrix(KreinProductSpace const& space, FundSym const& fs)
{
    return hermitian_part(CMat(space.H() * fs.n));
}

inline Complex scalar_product(KreinProductSpace const& space,
                              FundSym const& fs, CVec const& psi,
                              CVec const& phi)
{
    detail::check_spinor(space, psi);
    detail::check_spinor(space, phi);
    return psi.dot(space.H() * (fs.n * phi));
}

inline double norm(KreinProductSpace const& space, FundSym const& fs,
                   CVec const& psi)
{
    return std::sqrt(std::max(0.0, scalar_product(space, fs, psi, psi).real()));
}

/// G^{1/2} and G^{-1/2} of a Hermitian positive definite Gram matrix.
struct GramRoots
{
    CMat sqrt;
    CMat inv_sqrt;
};

inline GramRoots gram_roots(CMat const& gram)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(gram));
    RVec const lam = eig.eigenvalues();
    if (!(lam(0) > 0.0))
        fail_input("Gram matrix is not positive definite");
    CMat const& v = eig.eigenvectors();
    RVec const s = lam.cwiseSqrt();
    return {v * s.cast<Complex>().asDiagonal() * v.adjoint(),
            v * s.cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint()};
}

/// A in the orthonormal coordinates of <.,.>_n: G^{1/2} A G^{-1/2}.
inline CMat to_orthonormal(KreinProductSpace const& space, FundSym const& fs,
                           CMat const& a)
{
    if (a.rows() != space.dim_spinor() || a.cols() != space.dim_spinor())
        fail_input("operator has wrong dimensions");
    auto const roots = gram_roots(gram_matrix(space, fs));
    return roots.sqrt * a * roots.inv_sqrt;
}

/// Operator norm of A for the scalar product <.,.>_n.
inline double operator_norm(KreinProductSpace const& space, FundSym const& fs,
                            CMat const& a)
{
    Eigen::JacobiSVD<CMat> svd(to_orthonormal(space, fs, a));
    return svd.singularValues()(0);
}

//---------------------------------------------------------------------------//
// LORENTZIAN T = n2 n1
//---------------------------------------------------------------------------//

struct TQuadraticReport
{
    double g_v1v2 = 1.0;  //!< signed so that T^2 - 2 g T + 1 = 0, g >= 1
    double residual = 0.0;
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    RVec eigenvalues_T;  //!< real parts, descending
    double eigen_defect = 0.0;  //!< max distance of eig(T) to {lambda_pm}
};

namespace detail
{
/// The unit vector v spanning the one-dimensional side of a (anti-)Lorentzian
/// splitting, oriented so that fs.n = i^r gamma(v) with r in {0, 1}.
inline RVec oriented_unit_vector(KreinProductSpace const& space,
                                 FundSym const& fs)
{
    RMat const& basis = fs.side == FrameSide::negative ? fs.source.basis_V
                                                       : fs.source.basis_perp;
    if (basis.cols() != 1)
        fail_input("fundamental symmetry is not of vector type");
    RVec v = basis.col(0);
    CMat const gv = clifford_vector(space.rep, v);
    int const r = fs.r_phase % 2;
    if ((fs.n - i_pow(r) * gv).norm() > (fs.n + i_pow(r) * gv).norm())
        v = -v;
    return v;
}
}  // namespace detail

/*!
 * Residual of T^2 - 2 c T + 1 for T = n2 n1 in (anti-)Lorentzian signature,
 * where c = g(v1,v2) g(v,v) for the unit vectors behind n1, n2.
 */
inline TQuadraticReport check_T_quadratic(KreinProductSpace const& space,
                                          FundSym const& n1,
                                          FundSym const& n2)
{
    Signature const sig = space.rep.sig;
    if (sig.p != 1 && sig.q != 1)
        fail_input("T quadratic check needs Lorentzian or anti-Lorentzian "
                   "signature, got "
                   + sig.str());
    MetricSpace const ms = make_metric_space(space.rep);
    RVec const v1 = detail::oriented_unit_vector(space, n1);
    RVec const v2 = detail::oriented_unit_vector(space, n2);

    TQuadraticReport rep;
    rep.g_v1v2 = inner(ms, v1, v2) * inner(ms, v1, v1);
    CMat const t = n2.n * n1.n;
    CMat const id = space.rep.identity();
    rep.residual = (t * t - 2.0 * rep.g_v1v2 * t + id).norm();

    double const c = std::max(1.0, rep.g_v1v2);
    double const root = std::sqrt((c - 1.0) * (c + 1.0));
    rep.lambda_plus = c + root;
    rep.lambda_minus = c - root;

    Eigen::ComplexEigenSolver<CMat> eig(t);
    CVec const ev = eig.eigenvalues();
    rep.eigenvalues_T.resize(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
    {
        Complex const z = ev(i);
        double const d = std::min(std::abs(z - rep.lambda_plus),
                                  std::abs(z - rep.lambda_minus));
        rep.eigen_defect = std::max(rep.eigen_defect, d);
        rep.eigenvalues_T(i) = z.real();
    }
    std::sort(rep.eigenvalues_T.begin(), rep.eigenvalues_T.end(),
              std::greater<>());
    return rep;
}

}  // namespace krein
