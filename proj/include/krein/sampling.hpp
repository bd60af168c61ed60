// SPDX-License-Identifier: Apache-2.0
//
// Seeded random generators for property suites: elements of SO(g) near the
// identity component, random splittings, and stabilizers of a splitting.
#pragma once

#include "krein/common.hpp"
#include "krein/doppler.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdint>
#include <random>

namespace krein::sampling
{

inline constexpr std::uint64_t kDefaultSeed = 20161017;
inline constexpr double kEntryScale = 1.5;

using Engine = std::mt19937_64;

inline RMat random_antisymmetric(Engine& rng, int n,
                                 double scale = kEntryScale)
{
    std::uniform_real_distribution<double> dist(-scale, scale);
    RMat k = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = i + 1; j < n; ++j)
        {
            k(i, j) = dist(rng);
            k(j, i) = -k(i, j);
        }
    }
    return k;
}

/// A = g^{-1} K with K antisymmetric satisfies A^T g + g A = 0.
inline RMat random_so_generator(Engine& rng, MetricSpace const& ms,
                                double scale = kEntryScale)
{
    RMat const k = random_antisymmetric(rng, ms.dim(), scale);
    return ms.g.partialPivLu().solve(k);
}

inline RMat random_so(Engine& rng, MetricSpace const& ms,
                      double scale = kEntryScale)
{
    RMat const a = random_so_generator(rng, ms, scale);
    return a.exp();
}

inline Splitting random_splitting(Engine& rng, MetricSpace const& ms,
                                  double scale = kEntryScale)
{
    return transform_splitting(ms, random_so(rng, ms, scale),
                               reference_splitting(ms));
}

namespace detail
{
/// Block-antisymmetric generator in the splitting frame.
inline RMat random_frame_rotation(Engine& rng, Splitting const& sp,
                                  double scale)
{
    int const n = sp.dim();
    int const q = static_cast<int>(sp.basis_V.cols());
    RMat k = RMat::Zero(n, n);
    k.topLeftCorner(q, q) = random_antisymmetric(rng, q, scale);
    k.bottomRightCorner(n - q, n - q) = random_antisymmetric(rng, n - q, scale);
    return k;
}
}  // namespace detail

/*!
 * Generator of a random element of SO(g) n SO(g_s) stabilizing V: block
 * antisymmetric in the splitting frame.
 */
inline RMat random_stabilizer_generator(Engine& rng, Splitting const& sp,
                                        double scale = kEntryScale)
{
    RMat const k = detail::random_frame_rotation(rng, sp, scale);
    return sp.frame() * k * sp.frame_inverse();
}

/*!
 * Random element of SO(g) n SO(g_s) stabilizing V. The exponential is taken
 * in the splitting frame, where the generator is small and antisymmetric;
 * exponentiating the conjugated generator loses accuracy when the frame is
 * badly conditioned.
 */
inline RMat random_stabilizer(Engine& rng, Splitting const& sp,
                              double scale = kEntryScale)
{
    RMat const k = detail::random_frame_rotation(rng, sp, scale);
    return sp.frame() * k.exp() * sp.frame_inverse();
}

/// Random pseudo-unitary matrix for a Hermitian invertible G: exp(G^{-1} K).
inline CMat random_pseudo_unitary(Engine& rng, CMat const& gram,
                                  double scale = 1.0)
{
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::Index const n = gram.rows();
    CMat k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) = Complex(dist(rng), dist(rng));
    CMat const anti = (k - k.adjoint()) / 2.0;
    CMat const x = gram.partialPivLu().solve(anti);
    return x.exp();
}

}  // namespace krein::sampling
