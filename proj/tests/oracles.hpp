// SPDX-License-Identifier: Apache-2.0
//
// Reference values computed without the library's polar decomposition,
// spin lift or quadrature code paths.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle
{

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// e^xi with cosh xi = g.
inline double lorentz_dsf(double g)
{
    return std::exp(std::acosh(g));
}

/// g-orthogonal reflection: -1 on span(V), +1 on its g-complement.
inline RMat reflection(RMat const& g, RMat const& basis_v)
{
    RMat const gram = basis_v.transpose() * g * basis_v;
    RMat const proj = basis_v * gram.inverse() * basis_v.transpose() * g;
    return RMat::Identity(g.rows(), g.rows()) - 2.0 * proj;
}

/// Eigenvalues of s2 s1, sorted descending by magnitude. Their square roots
/// are the spectrum of the positive part of any map carrying V1 to V2.
inline std::vector<double> reflection_spectrum(RMat const& g, RMat const& v1,
                                               RMat const& v2)
{
    RMat const t = reflection(g, v2) * reflection(g, v1);
    Eigen::EigenSolver<RMat> eig(t, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        out.push_back(std::abs(eig.eigenvalues()(i)));
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// Doppler shift factor as sqrt r(s2 s1).
inline double dsf(RMat const& g, RMat const& v1, RMat const& v2)
{
    return std::sqrt(reflection_spectrum(g, v1, v2).front());
}

/// Spinor lift norm as prod_{mu > 1} mu^{1/4} over the spectrum of s2 s1.
inline double lift_norm(RMat const& g, RMat const& v1, RMat const& v2)
{
    double prod = 1.0;
    for (double mu : reflection_spectrum(g, v1, v2))
        prod *= mu > 1.0 ? std::pow(mu, 0.25) : 1.0;
    return prod;
}

/// int_{|t|<=X} e^{-|t|} dt.
inline double convergent_partial(double x)
{
    return 2.0 * (1.0 - std::exp(-x));
}

/// int_{|t|<=X} e^{-|t|} cosh t dt.
inline double divergent_partial(double x)
{
    return x + 0.5 * (1.0 - std::exp(-2.0 * x));
}

/// Gaussian smearing of cosh about y0 with standard deviation w.
inline double smeared_cosh(double y0, double w)
{
    return std::cosh(y0) * std::exp(0.5 * w * w);
}

//---------------------------------------------------------------------------//
// SCHWARZSCHILD RADIAL GEODESICS (r_s = 1)
//---------------------------------------------------------------------------//

struct RadialState
{
    double t = 0.0;
    double r = 0.0;
    double ut = 0.0;  //!< dt/dtau
    double ur = 0.0;  //!< dr/dtau
};

/// Full second-order geodesic equations for (t, r) along a radial path.
inline RadialState geodesic_rhs(RadialState const& s)
{
    double const f = 1.0 - 1.0 / s.r;
    double const fp = 1.0 / (s.r * s.r);
    // Christoffels: G^t_{tr} = f'/(2f), G^r_{tt} = f f'/2, G^r_{rr} = -f'/(2f)
    double const at = -(fp / f) * s.ut * s.ur;
    double const ar = -0.5 * f * fp * s.ut * s.ut + 0.5 * (fp / f) * s.ur * s.ur;
    return {s.ut, s.ur, at, ar};
}

inline RadialState rk4_step(RadialState const& s, double h)
{
    auto add = [](RadialState a, RadialState const& b, double c) {
        a.t += c * b.t;
        a.r += c * b.r;
        a.ut += c * b.ut;
        a.ur += c * b.ur;
        return a;
    };
    RadialState const k1 = geodesic_rhs(s);
    RadialState const k2 = geodesic_rhs(add(s, k1, 0.5 * h));
    RadialState const k3 = geodesic_rhs(add(s, k2, 0.5 * h));
    RadialState const k4 = geodesic_rhs(add(s, k3, h));
    RadialState out = s;
    out = add(out, k1, h / 6.0);
    out = add(out, k2, h / 3.0);
    out = add(out, k3, h / 3.0);
    out = add(out, k4, h / 6.0);
    return out;
}

/*!
 * Integrates an ingoing radial geodesic of energy E from r_start until it
 * reaches each requested radius (descending), returning (u^t, u^r) there.
 * Start data: u^t = E/f and u^r from unit normalization at r_start only.
 */
inline std::vector<RadialState> ingoing_geodesic(double energy, double r_start,
                                                 std::vector<double> radii,
                                                 double h = 1e-4)
{
    std::sort(radii.rbegin(), radii.rend());
    double const f0 = 1.0 - 1.0 / r_start;
    RadialState s{0.0, r_start, energy / f0,
                  -std::sqrt(energy * energy - f0)};
    std::vector<RadialState> out;
    for (double target : radii)
    {
        while (s.r > target)
        {
            RadialState const next = rk4_step(s, h);
            if (next.r <= target)
            {
                // Bisect the final step to land on the target radius.
                double lo = 0.0, hi = h;
                for (int it = 0; it < 60; ++it)
                {
                    double const mid = 0.5 * (lo + hi);
                    (rk4_step(s, mid).r > target ? lo : hi) = mid;
                }
                s = rk4_step(s, 0.5 * (lo + hi));
                break;
            }
            s = next;
        }
        out.push_back(s);
    }
    return out;
}

/// g(u, w) for radial velocities in Schwarzschild coordinates.
inline double radial_inner(double r, RadialState const& u,
                           RadialState const& w)
{
    double const f = 1.0 - 1.0 / r;
    return f * u.ut * w.ut - u.ur * w.ur / f;
}

}  // namespace oracle
