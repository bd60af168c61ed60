// SPDX-License-Identifier: Apache-2.0
//
// Maximal negative definite subspaces of a real metric vector space, the
// g-orthogonal symmetries they define, the indefinite polar decomposition of
// a pseudo-orthogonal map carrying one onto another, and the Doppler shift
// factor between them.
#pragma once

#include "krein/clifford_rep.hpp"
#include "krein/common.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace krein
{

//---------------------------------------------------------------------------//
// METRIC SPACE
//---------------------------------------------------------------------------//

struct MetricSpace
{
    RMat g;
    Signature sig;

    int dim() const { return static_cast<int>(g.rows()); }
};

inline MetricSpace make_metric_space(RMat const& g)
{
    if (g.rows() != g.cols() || g.rows() == 0)
        fail_input("metric must be a non-empty square matrix");
    if (!g.allFinite())
        fail_input("metric has non-finite entries");
    double const scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        fail_input("metric must be symmetric");

    Eigen::SelfAdjointEigenSolver<RMat> eig(g);
    MetricSpace ms{g, {}};
    for (Eigen::Index i = 0; i < g.rows(); ++i)
    {
        double const lam = eig.eigenvalues()(i);
        if (std::abs(lam) <= tol::degeneracy * scale)
            fail_input("metric is degenerate");
        (lam > 0 ? ms.sig.p : ms.sig.q) += 1;
    }
    return ms;
}

inline MetricSpace make_metric_space(GammaRep const& rep)
{
    return make_metric_space(rep.metric());
}

inline MetricSpace make_metric_space(Signature const& sig)
{
    validate(sig);
    auto const signs = default_metric_signs(sig);
    RMat g = RMat::Zero(sig.dim(), sig.dim());
    for (int mu = 0; mu < sig.dim(); ++mu)
        g(mu, mu) = signs[mu];
    return make_metric_space(g);
}

inline double inner(MetricSpace const& ms, RVec const& u, RVec const& v)
{
    return u.dot(ms.g * v);
}

//---------------------------------------------------------------------------//
// SPLITTINGS
//---------------------------------------------------------------------------//

/*!
 * A fundamental decomposition V + V^perp of the metric space.
 *
 * basis_V is g-pseudo-orthonormal with g(e_i, e_j) = -delta_ij; basis_perp
 * spans the g-orthogonal complement with g(f_i, f_j) = +delta_ij. Together
 * they form a frame that is orthonormal for the twisted metric g_s.
 */
struct Splitting
{
    RMat g;           //!< metric the splitting was built against
    RMat basis_V;     //!< n x q
    RMat basis_perp;  //!< n x p
    RMat s;           //!< g-orthogonal symmetry: -1 on V, +1 on V^perp
    RMat g_s;         //!< matrix of g_s(u, v) = g(s u, v), positive definite

    int dim() const { return static_cast<int>(g.rows()); }

    /// [basis_V | basis_perp]; F^T g F = diag(-1..-1, +1..+1).
    RMat frame() const
    {
        RMat f(dim(), dim());
        f << basis_V, basis_perp;
        return f;
    }

    /// F^{-1} = J F^T g with J = diag(-1..-1, +1..+1), exact for the frame.
    RMat frame_inverse() const
    {
        RMat inv = frame().transpose() * g;
        inv.topRows(basis_V.cols()) *= -1.0;
        return inv;
    }
};

namespace detail
{
/*!
 * Pivoted Gram-Schmidt for the form sign * g. Returns columns with
 * sign * g(e_i, e_j) = delta_ij; throws if the form is not definite on the
 * span.
 */
inline RMat definite_gram_schmidt(RMat const& g, RMat cols, double sign,
                                  char const* what)
{
    int const k = static_cast<int>(cols.cols());
    RMat out(cols.rows(), k);
    std::vector<bool> used(k, false);
    for (int step = 0; step < k; ++step)
    {
        int best = -1;
        double best_ratio = 0.0;
        for (int j = 0; j < k; ++j)
        {
            if (used[j])
                continue;
            double const nrm2 = cols.col(j).squaredNorm();
            if (nrm2 <= 0.0)
                continue;
            double const ratio
                = sign * cols.col(j).dot(g * cols.col(j)) / nrm2;
            if (best < 0 || ratio > best_ratio)
            {
                best = j;
                best_ratio = ratio;
            }
        }
        if (best < 0 || best_ratio <= tol::degeneracy)
            fail_input(std::string(what));
        used[best] = true;
        RVec e = cols.col(best);
        e /= std::sqrt(sign * e.dot(g * e));
        out.col(step) = e;
        for (int j = 0; j < k; ++j)
        {
            if (used[j])
                continue;
            // sign*g(e,e) = 1
            cols.col(j) -= (sign * e.dot(g * cols.col(j))) * e;
        }
    }
    return out;
}
}  // namespace detail

/*!
 * Validate and normalize a candidate basis of a maximal negative definite
 * subspace. The g-orthogonal complement is found from a QR factorization of
 * g * basis and normalized with +g.
 */
inline Splitting make_splitting(MetricSpace const& ms, RMat const& candidate)
{
    int const n = ms.dim();
    if (candidate.rows() != n)
        fail_input("splitting basis has " + std::to_string(candidate.rows())
                   + " rows, metric dimension is " + std::to_string(n));
    if (candidate.cols() != ms.sig.q)
        fail_input("splitting is not maximal: basis has "
                   + std::to_string(candidate.cols())
                   + " vectors, negative index is "
                   + std::to_string(ms.sig.q));
    if (!candidate.allFinite())
        fail_input("splitting basis has non-finite entries");
    if (candidate.cols() > 0)
    {
        Eigen::ColPivHouseholderQR<RMat> qr(candidate);
        qr.setThreshold(tol::degeneracy);
        if (qr.rank() != candidate.cols())
            fail_input("splitting basis columns are linearly dependent");
    }

    Splitting sp;
    sp.g = ms.g;
    sp.basis_V = detail::definite_gram_schmidt(
        ms.g, candidate, -1.0,
        "g is not negative definite on the candidate subspace");

    RMat const w = ms.g * sp.basis_V;
    RMat complement;
    if (w.cols() == 0)
    {
        complement = RMat::Identity(n, n);
    }
    else
    {
        Eigen::HouseholderQR<RMat> qr(w);
        RMat const q = qr.householderQ() * RMat::Identity(n, n);
        complement = q.rightCols(n - w.cols());
    }
    sp.basis_perp = detail::definite_gram_schmidt(
        ms.g, complement, +1.0,
        "g-orthogonal complement is not positive definite");

    sp.s = RMat::Identity(n, n)
           + 2.0 * sp.basis_V * sp.basis_V.transpose() * ms.g;
    sp.g_s = ms.g * sp.s;
    sp.g_s = ((sp.g_s + sp.g_s.transpose()) / 2.0).eval();

    Eigen::LLT<RMat> llt(sp.g_s);
    if (llt.info() != Eigen::Success)
        fail_consistency("twisted metric g_s is not positive definite");
    return sp;
}

/// The splitting whose V is spanned by the negative eigenvectors of g.
inline Splitting reference_splitting(MetricSpace const& ms)
{
    Eigen::SelfAdjointEigenSolver<RMat> eig(ms.g);
    RMat basis(ms.dim(), ms.sig.q);
    int col = 0;
    for (int i = 0; i < ms.dim(); ++i)
    {
        if (eig.eigenvalues()(i) < 0)
            basis.col(col++) = eig.eigenvectors().col(i);
    }
    // Prefer exact coordinate axes for a diagonal metric.
    if (ms.g.isDiagonal())
    {
        col = 0;
        basis.setZero();
        for (int i = 0; i < ms.dim(); ++i)
        {
            if (ms.g(i, i) < 0)
                basis(i, col++) = 1.0;
        }
    }
    return make_splitting(ms, basis);
}

/// Splitting whose V^perp is spanned by one unit timelike vector (p = 1).
inline Splitting splitting_from_timelike(MetricSpace const& ms,
                                         RVec const& v)
{
    if (ms.sig.p != 1)
        fail_input("timelike-vector splittings need exactly one positive "
                   "direction, signature is "
                   + ms.sig.str());
    if (v.size() != ms.dim())
        fail_input("vector dimension does not match metric");
    double const vv = inner(ms, v, v);
    if (!(vv > tol::degeneracy))
        fail_input("vector is not timelike (g(v,v) = " + std::to_string(vv)
                   + ")");
    RVec const w = ms.g * v;
    Eigen::HouseholderQR<RMat> qr(w);
    RMat const q = qr.householderQ() * RMat::Identity(ms.dim(), ms.dim());
    return make_splitting(ms, q.rightCols(ms.dim() - 1));
}

/// Residuals of the Splitting invariants.
struct SplittingResiduals
{
    double involution = 0;  //!< ||s^2 - I||
    double isometry = 0;    //!< ||s^T g s - g||
    double frame = 0;       //!< ||F^T g F - diag(-1,+1)||
};

inline SplittingResiduals splitting_residuals(Splitting const& sp)
{
    int const n = sp.dim();
    RMat const id = RMat::Identity(n, n);
    SplittingResiduals res;
    res.involution = (sp.s * sp.s - id).norm();
    res.isometry = (sp.s.transpose() * sp.g * sp.s - sp.g).norm();
    RMat j = id;
    for (Eigen::Index i = 0; i < sp.basis_V.cols(); ++i)
        j(i, i) = -1.0;
    RMat const f = sp.frame();
    res.frame = (f.transpose() * sp.g * f - j).norm();
    return res;
}

/// Operator norm of A with respect to the scalar product g_s of a splitting.
inline double operator_norm_g(Splitting const& sp, RMat const& a)
{
    // The splitting frame is g_s-orthonormal.
    RMat const f = sp.frame();
    RMat const ahat = sp.frame_inverse() * a * f;
    Eigen::JacobiSVD<RMat> svd(ahat);
    return svd.singularValues()(0);
}

//---------------------------------------------------------------------------//
// CONNECTING MAP AND POLAR DECOMPOSITION
//---------------------------------------------------------------------------//

/*!
 * Some Lambda in SO(g) with Lambda V1 = V2: maps the frame of split1 onto the
 * frame of split2, flipping one V2^perp frame vector if the determinant is -1.
 */
inline RMat connecting_map(MetricSpace const& ms, Splitting const& split1,
                           Splitting const& split2)
{
    if (split1.dim() != ms.dim() || split2.dim() != ms.dim())
        fail_input("splitting dimension does not match metric");
    RMat const f1 = split1.frame();
    RMat f2 = split2.frame();
    double const det = f2.determinant() / f1.determinant();
    if (det < 0)
        f2.col(ms.dim() - 1) *= -1.0;
    RMat const lambda = f2 * split1.frame_inverse();
    return lambda;
}

/// Residuals of Lambda^T g Lambda = g and det Lambda = 1.
struct SOResiduals
{
    double isometry = 0;
    double det = 0;
};

inline SOResiduals so_residuals(MetricSpace const& ms, RMat const& lambda)
{
    return {(lambda.transpose() * ms.g * lambda - ms.g).norm(),
            std::abs(lambda.determinant() - 1.0)};
}

struct PolarResiduals
{
    double factorization = 0;   //!< ||Lambda - O L|| / ||Lambda||
    double L_isometry = 0;      //!< ||L^T g L - g||
    double O_unitary = 0;       //!< O in SO(g2): ||O^T g2 O - g2||
    double O_stabilizes = 0;    //!< ||O s2 - s2 O||
    double adjoint_identity = 0;  //!< ||Lambda^* Lambda - s2 s1|| (with V1)
    double maps_V1_to_V2 = 0;     //!< ||(1 + s2) L basis_V1|| (with V1)
    double spectrum_pairing = 0;  //!< relative defect of lambda <-> 1/lambda
};

struct PolarParts
{
    RMat Lambda;
    RMat O;
    RMat L;
    RVec spectrum_L;  //!< descending
    RMat frame2;      //!< g2-orthonormal frame of split2
    RMat frame2_inv;
    RMat eigvecs_hat; //!< eigenvectors of L in frame2 coordinates
    PolarResiduals residuals;
};

namespace detail
{
inline double inversion_pairing_defect(RVec const& descending)
{
    // lambda_i * lambda_{n-1-i} = 1 for a spectrum closed under inversion.
    double worst = 0.0;
    Eigen::Index const n = descending.size();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        double const prod = descending(i) * descending(n - 1 - i);
        worst = std::max(worst, std::abs(prod - 1.0));
    }
    return worst;
}
}  // namespace detail

/*!
 * Lambda = O L with L positive g2-self-adjoint and O in SO(g) n SO(g2).
 *
 * In the frame of split2 (g2-orthonormal) the g2-adjoint is the transpose,
 * so this is the ordinary polar decomposition of the frame matrix of
 * Lambda, computed from its SVD for accuracy at large rapidity.
 */
inline PolarParts polar_decompose(MetricSpace const& ms,
                                  Splitting const& split2,
                                  RMat const& lambda,
                                  Splitting const* split1 = nullptr)
{
    int const n = ms.dim();
    if (lambda.rows() != n || lambda.cols() != n)
        fail_input("Lambda has wrong dimensions");
    double const lnorm = std::max(1.0, lambda.norm());
    auto const so = so_residuals(ms, lambda);
    if (so.isometry > 1e-9 * lnorm * lnorm || so.det > 1e-9 * lnorm)
        fail_input("Lambda is not in SO(g)");

    RMat const f2 = split2.frame();
    RMat const f2_inv = split2.frame_inverse();
    RMat const lhat = f2_inv * lambda * f2;

    Eigen::JacobiSVD<RMat> svd(lhat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RVec const sigma = svd.singularValues();
    if (sigma(n - 1) <= 0.0)
        fail_input("Lambda^* Lambda is not positive in the g2 inner product");
    RMat const& u = svd.matrixU();
    RMat const& v = svd.matrixV();

    PolarParts pp;
    pp.Lambda = lambda;
    pp.spectrum_L = sigma;
    pp.frame2 = f2;
    pp.frame2_inv = f2_inv;
    pp.eigvecs_hat = v;
    RMat const l_hat = v * sigma.asDiagonal() * v.transpose();
    RMat const o_hat = u * v.transpose();
    pp.L = f2 * l_hat * f2_inv;
    pp.O = f2 * o_hat * f2_inv;

    auto& res = pp.residuals;
    res.factorization = (lambda - pp.O * pp.L).norm() / lnorm;
    res.L_isometry = (pp.L.transpose() * ms.g * pp.L - ms.g).norm();
    res.O_unitary
        = (pp.O.transpose() * split2.g_s * pp.O - split2.g_s).norm();
    res.O_stabilizes = (pp.O * split2.s - split2.s * pp.O).norm();
    res.spectrum_pairing = detail::inversion_pairing_defect(sigma);
    if (split1 != nullptr)
    {
        RMat const g2inv = split2.g_s.inverse();
        RMat const adj = g2inv * lambda.transpose() * split2.g_s;
        res.adjoint_identity = (adj * lambda - split2.s * split1->s).norm();
        RMat const image = pp.L * split1->basis_V;
        res.maps_V1_to_V2
            = ((RMat::Identity(n, n) + split2.s) * image).norm();
    }

    double const bound = 1e-6 * sigma(0) * sigma(0);
    if (res.factorization > bound || res.L_isometry > bound
        || res.O_unitary > bound || res.spectrum_pairing > bound)
    {
        fail_consistency("polar decomposition invariants violated");
    }
    return pp;
}

//---------------------------------------------------------------------------//
// DOPPLER SHIFT FACTOR
//---------------------------------------------------------------------------//

struct DSFResult
{
    double dsf = 1.0;
    double rapidity = 0.0;
    double map_norm = 1.0;  //!< ||Lambda||_{g2} of the connecting map
    PolarParts polar;
};

inline DSFResult dsf(MetricSpace const& ms, Splitting const& split1,
                     Splitting const& split2)
{
    RMat const lambda = connecting_map(ms, split1, split2);
    DSFResult out;
    out.polar = polar_decompose(ms, split2, lambda, &split1);
    // r(L) >= 1 holds exactly; clamp rounding below one.
    out.dsf = std::max(1.0, out.polar.spectrum_L(0));
    out.rapidity = std::log(out.dsf);
    out.map_norm = operator_norm_g(split2, lambda);
    return out;
}

/// Doppler shift factor of two co-oriented unit timelike vectors.
inline double dsf_lorentzian(double g_v1v2)
{
    if (!(g_v1v2 >= 1.0))
    {
        fail_input("g(v1,v2) must be >= 1 for co-oriented unit timelike "
                   "vectors, got "
                   + std::to_string(g_v1v2));
    }
    return g_v1v2 + std::sqrt((g_v1v2 - 1.0) * (g_v1v2 + 1.0));
}

/// Number of eigenvalues of L strictly above 1 + rel_tol.
inline int count_expanding(RVec const& spectrum_L, double rel_tol = 1e-8)
{
    int count = 0;
    for (Eigen::Index i = 0; i < spectrum_L.size(); ++i)
        count += spectrum_L(i) > 1.0 + rel_tol ? 1 : 0;
    return count;
}

/// Boost of rapidity xi in the plane (i, j), g_ii = +1, g_jj = -1.
inline RMat plane_boost(int n, int i, int j, double xi)
{
    RMat b = RMat::Identity(n, n);
    b(i, i) = b(j, j) = std::cosh(xi);
    b(i, j) = b(j, i) = std::sinh(xi);
    return b;
}

/*!
 * The q-boost: commuting boosts of the given rapidities in the couples
 * (e_0,e_1), (e_2,e_3), ... of the default (interleaved) metric ordering.
 */
inline RMat q_boost(Signature const& sig, std::vector<double> const& rapidities)
{
    validate(sig);
    if (static_cast<int>(rapidities.size()) > std::min(sig.p, sig.q))
        fail_input("q-boost needs at most min(p,q) rapidities");
    RMat out = RMat::Identity(sig.dim(), sig.dim());
    for (std::size_t k = 0; k < rapidities.size(); ++k)
    {
        int const i = static_cast<int>(2 * k);
        out = plane_boost(sig.dim(), i, i + 1, rapidities[k]) * out;
    }
    return out;
}

/// The image of a splitting under a map in O(g).
inline Splitting transform_splitting(MetricSpace const& ms, RMat const& map,
                                     Splitting const& sp)
{
    return make_splitting(ms, map * sp.basis_V);
}

}  // namespace krein
