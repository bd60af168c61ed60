// SPDX-License-Identifier: Apache-2.0
#include "krein/doppler.hpp"
#include "krein/sampling.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace krein
{
namespace
{

RVec boost_vector(int n, double xi)
{
    RVec v = RVec::Zero(n);
    v(0) = std::cosh(xi);
    v(1) = std::sinh(xi);
    return v;
}

/// Random future unit timelike vector in (1, n-1).
RVec random_timelike(sampling::Engine& rng, int n, double spread)
{
    std::uniform_real_distribution<double> ud(-spread, spread);
    RVec v(n);
    for (int i = 1; i < n; ++i)
        v(i) = ud(rng);
    v(0) = std::sqrt(1.0 + v.tail(n - 1).squaredNorm());
    return v;
}

TEST(MetricSpace, InertiaAndValidation)
{
    RMat g(2, 2);
    g << 0, 1, 1, 0;
    MetricSpace const ms = make_metric_space(g);
    EXPECT_EQ(ms.sig, (Signature{1, 1}));
    RMat bad(2, 2);
    bad << 1, 2, 0, 1;
    EXPECT_THROW(make_metric_space(bad), Error);
    EXPECT_THROW(make_metric_space(RMat::Zero(2, 2)), Error);
}

TEST(Splitting, MinkowskiReference)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    RMat v = RMat::Zero(4, 3);
    v(1, 0) = v(2, 1) = v(3, 2) = 1.0;
    Splitting const sp = make_splitting(ms, v);
    RMat expected_s = RMat::Identity(4, 4);
    expected_s(1, 1) = expected_s(2, 2) = expected_s(3, 3) = -1.0;
    EXPECT_LE((sp.s - expected_s).norm(), 1e-15);
    EXPECT_LE((sp.g_s - RMat::Identity(4, 4)).norm(), 1e-15);
}

TEST(Splitting, BoostedIsConjugated)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    RMat const b = plane_boost(4, 0, 1, 0.8);
    Splitting const ref = reference_splitting(ms);
    Splitting const sp = transform_splitting(ms, b, ref);
    EXPECT_LE((sp.s - b * ref.s * b.inverse()).norm(), 1e-12);
    auto const res = splitting_residuals(sp);
    EXPECT_LE(res.involution, 1e-12);
    EXPECT_LE(res.isometry, 1e-12);
    EXPECT_LE(res.frame, 1e-12);
}

TEST(Splitting, RejectsInvalidCandidates)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    RMat with_time = RMat::Zero(4, 3);
    with_time(0, 0) = with_time(2, 1) = with_time(3, 2) = 1.0;
    EXPECT_THROW(make_splitting(ms, with_time), Error);
    RMat too_small = RMat::Zero(4, 2);
    too_small(1, 0) = too_small(2, 1) = 1.0;
    EXPECT_THROW(make_splitting(ms, too_small), Error);
    RMat dependent = RMat::Zero(4, 3);
    dependent(1, 0) = dependent(1, 1) = dependent(2, 2) = 1.0;
    EXPECT_THROW(make_splitting(ms, dependent), Error);
}

TEST(Splitting, InvariantsOnRandomSplittings)
{
    sampling::Engine rng(2);
    for (Signature sig : {Signature{1, 3}, Signature{2, 2}, Signature{3, 3}})
    {
        MetricSpace const ms = make_metric_space(sig);
        for (int k = 0; k < 200; ++k)
        {
            Splitting const sp = sampling::random_splitting(rng, ms);
            auto const res = splitting_residuals(sp);
            double const scale = sp.g_s.norm();
            ASSERT_LE(res.involution, 1e-10 * scale);
            ASSERT_LE(res.isometry, 1e-10 * scale);
            ASSERT_LE(res.frame, 1e-10 * scale);
            Eigen::SelfAdjointEigenSolver<RMat> eig(sp.g_s);
            ASSERT_GT(eig.eigenvalues()(0), 0.0);
        }
    }
}

TEST(ConnectingMap, IdentityForEqualSplittings)
{
    MetricSpace const ms = make_metric_space(Signature{2, 2});
    Splitting const sp = reference_splitting(ms);
    RMat const lambda = connecting_map(ms, sp, sp);
    EXPECT_LE((lambda - RMat::Identity(4, 4)).norm(), 1e-14);
}

TEST(ConnectingMap, InSOgAndCarriesV1ToV2)
{
    sampling::Engine rng(17);
    for (Signature sig : {Signature{1, 3}, Signature{2, 2}, Signature{2, 4}})
    {
        MetricSpace const ms = make_metric_space(sig);
        for (int k = 0; k < 100; ++k)
        {
            Splitting const s1 = sampling::random_splitting(rng, ms);
            Splitting const s2 = sampling::random_splitting(rng, ms);
            RMat const lambda = connecting_map(ms, s1, s2);
            auto const so = so_residuals(ms, lambda);
            double const scale = lambda.squaredNorm();
            ASSERT_LE(so.isometry, 1e-10 * scale);
            ASSERT_LE(so.det, 1e-10 * scale);
            // (1 + s2) annihilates V2.
            RMat const image = lambda * s1.basis_V;
            ASSERT_LE(((RMat::Identity(sig.dim(), sig.dim()) + s2.s) * image)
                          .norm(),
                      1e-10 * scale);
        }
    }
}

TEST(ConnectingMap, LorentzianReproducesBoostUpToStabilizer)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    double const xi = 0.9;
    RVec const v2 = boost_vector(4, xi);
    Splitting const s1 = reference_splitting(ms);
    Splitting const s2 = splitting_from_timelike(ms, v2);
    RMat const lambda = connecting_map(ms, s1, s2);
    RMat const boost = plane_boost(4, 0, 1, xi);
    // boost^{-1} lambda fixes the rest splitting.
    RMat const stab = boost.inverse() * lambda;
    EXPECT_LE((stab * s1.s - s1.s * stab).norm(), 1e-12);
    auto const pp = polar_decompose(ms, s2, lambda, &s1);
    EXPECT_LE((pp.L - boost).norm(), 1e-12);
}

TEST(PolarDecompose, EqualSplittings)
{
    MetricSpace const ms = make_metric_space(Signature{2, 2});
    Splitting const sp = reference_splitting(ms);
    RMat const rot = plane_boost(4, 0, 1, 0.0);
    auto const pp = polar_decompose(ms, sp, rot, &sp);
    EXPECT_LE((pp.L - RMat::Identity(4, 4)).norm(), 1e-14);
    EXPECT_LE((pp.O - rot).norm(), 1e-14);
}

TEST(PolarDecompose, LorentzianSpectrum)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    double const xi = 1.3;
    Splitting const s1 = reference_splitting(ms);
    Splitting const s2 = splitting_from_timelike(ms, boost_vector(4, xi));
    auto const pp = polar_decompose(ms, s2, connecting_map(ms, s1, s2), &s1);
    RVec expected(4);
    expected << std::exp(xi), 1.0, 1.0, std::exp(-xi);
    EXPECT_LE((pp.spectrum_L - expected).norm(), 1e-12);
}

TEST(PolarDecompose, QBoostSpectrum)
{
    MetricSpace const ms = make_metric_space(Signature{2, 2});
    RMat const b = q_boost(ms.sig, {0.3, 0.7});
    Splitting const s1 = reference_splitting(ms);
    Splitting const s2 = transform_splitting(ms, b, s1);
    auto const pp = polar_decompose(ms, s2, connecting_map(ms, s1, s2), &s1);
    RVec expected(4);
    expected << std::exp(0.7), std::exp(0.3), std::exp(-0.3), std::exp(-0.7);
    EXPECT_LE((pp.spectrum_L - expected).norm(), 1e-12);
}

TEST(PolarDecompose, InvariantsOnRandomPairs)
{
    sampling::Engine rng(99);
    for (Signature sig : {Signature{1, 3}, Signature{2, 2}, Signature{3, 3},
                          Signature{2, 4}})
    {
        SCOPED_TRACE(sig.str());
        MetricSpace const ms = make_metric_space(sig);
        for (int k = 0; k < 200; ++k)
        {
            Splitting const s1 = sampling::random_splitting(rng, ms);
            Splitting const s2 = sampling::random_splitting(rng, ms);
            auto const pp
                = polar_decompose(ms, s2, connecting_map(ms, s1, s2), &s1);
            double const scale = pp.spectrum_L(0) * pp.spectrum_L(0);
            auto const& r = pp.residuals;
            ASSERT_LE(r.factorization, 1e-10 * scale);
            ASSERT_LE(r.L_isometry, 1e-10 * scale);
            ASSERT_LE(r.O_unitary, 1e-10 * scale);
            ASSERT_LE(r.O_stabilizes, 1e-10 * scale);
            ASSERT_LE(r.adjoint_identity, 1e-10 * scale);
            ASSERT_LE(r.maps_V1_to_V2, 1e-10 * scale);
            ASSERT_LE(r.spectrum_pairing, 1e-8);
        }
    }
}

TEST(DSF, Examples)
{
    MetricSpace const ms = make_metric_space(Signature{1, 3});
    Splitting const s1 = reference_splitting(ms);
    EXPECT_DOUBLE_EQ(dsf(ms, s1, s1).dsf, 1.0);

    Splitting const s2
        = splitting_from_timelike(ms, boost_vector(4, std::log(2.0)));
    EXPECT_NEAR(dsf(ms, s1, s2).dsf, 2.0, 1e-12);
    EXPECT_NEAR(dsf(ms, s1, s2).rapidity, std::log(2.0), 1e-12);

    MetricSpace const ms22 = make_metric_space(Signature{2, 2});
    Splitting const r22 = reference_splitting(ms22);
    Splitting const q22
        = transform_splitting(ms22, q_boost(ms22.sig, {0.3, 0.7}), r22);
    EXPECT_NEAR(dsf(ms22, r22, q22).dsf, std::exp(0.7), 1e-12);
}

TEST(DSF, LorentzianClosedFormExamples)
{
    EXPECT_DOUBLE_EQ(dsf_lorentzian(1.0), 1.0);
    EXPECT_DOUBLE_EQ(dsf_lorentzian(1.25), 2.0);
    EXPECT_THROW(dsf_lorentzian(0.5), Error);
    sampling::Engine rng(4);
    std::uniform_real_distribution<double> ud(0.0, 5.0);
    for (int k = 0; k < 1000; ++k)
    {
        double const xi = ud(rng);
        ASSERT_LE(std::abs(dsf_lorentzian(std::cosh(xi)) / std::exp(xi) - 1.0),
                  1e-12);
    }
}

TEST(DSF, LorentzianOracleOnRandomTimelikePairs)
{
    sampling::Engine rng(1234);
    for (int n : {2, 4})
    {
        MetricSpace const ms = make_metric_space(Signature{1, n - 1});
        for (int k = 0; k < 1000; ++k)
        {
            RVec const v1 = random_timelike(rng, n, 2.0);
            RVec const v2 = random_timelike(rng, n, 2.0);
            double const g = inner(ms, v1, v2);
            double const got
                = dsf(ms, splitting_from_timelike(ms, v1),
                      splitting_from_timelike(ms, v2)).dsf;
            ASSERT_LE(std::abs(got - dsf_lorentzian(g)), 1e-10 * got)
                << "n=" << n << " g=" << g;
        }
    }
}

TEST(DSF, MatchesReflectionOracle)
{
    sampling::Engine rng(77);
    for (Signature sig : {Signature{1, 3}, Signature{2, 2}, Signature{2, 4},
                          Signature{3, 3}, Signature{4, 4}})
    {
        MetricSpace const ms = make_metric_space(sig);
        for (int k = 0; k < 200; ++k)
        {
            Splitting const s1 = sampling::random_splitting(rng, ms, 0.7);
            Splitting const s2 = sampling::random_splitting(rng, ms, 0.7);
            double const got = dsf(ms, s1, s2).dsf;
            double const want = oracle::dsf(ms.g, s1.basis_V, s2.basis_V);
            ASSERT_LE(std::abs(got - want), 1e-8 * want) << sig.str();
        }
    }
}

TEST(DSF, SymmetryLemmaOneAndExpandingCount)
{
    sampling::Engine rng(55);
    for (Signature sig : {Signature{1, 3}, Signature{2, 2}, Signature{2, 4},
                          Signature{3, 3}})
    {
        SCOPED_TRACE(sig.str());
        MetricSpace const ms = make_metric_space(sig);
        int const min_pq = std::min(sig.p, sig.q);
        for (int k = 0; k < 500; ++k)
        {
            Splitting const s1 = sampling::random_splitting(rng, ms);
            Splitting const s2 = sampling::random_splitting(rng, ms);
            DSFResult const d = dsf(ms, s1, s2);
            ASSERT_GE(d.dsf, 1.0);
            ASSERT_LE(std::abs(d.dsf - dsf(ms, s2, s1).dsf), 1e-10);
            ASSERT_LE(std::abs(d.map_norm - d.dsf), 1e-10);

            RMat const o2
                = sampling::random_stabilizer(rng, s2);
            ASSERT_LE(std::abs(operator_norm_g(s2, o2 * d.polar.Lambda)
                               - d.dsf),
                      1e-10);
            RMat const o1
                = sampling::random_stabilizer(rng, s1);
            ASSERT_LE(std::abs(operator_norm_g(s2, d.polar.Lambda * o1)
                               - d.dsf),
                      1e-10);
            ASSERT_LE(count_expanding(d.polar.spectrum_L), min_pq);
        }
    }
}

TEST(DSF, OneIffSameSubspace)
{
    MetricSpace const ms = make_metric_space(Signature{2, 2});
    Splitting const s1 = reference_splitting(ms);
    // A rotation inside V moves the frame but not the subspace.
    RMat k = RMat::Zero(4, 4);
    k(1, 3) = 0.7;
    k(3, 1) = -0.7;
    Splitting const same = transform_splitting(ms, k.exp(), s1);
    EXPECT_NEAR(dsf(ms, s1, same).dsf, 1.0, 1e-12);
    Splitting const other = transform_splitting(
        ms, plane_boost(4, 0, 1, 1e-4), s1);
    EXPECT_GT(dsf(ms, s1, other).dsf - 1.0, 1e-8);
}

TEST(QBoost, Validation)
{
    EXPECT_THROW(q_boost(Signature{1, 3}, {0.1, 0.2}), Error);
    RMat const b = q_boost(Signature{3, 3}, {0.1, 0.2, 0.3});
    MetricSpace const ms = make_metric_space(Signature{3, 3});
    EXPECT_LE(so_residuals(ms, b).isometry, 1e-13);
}

}  // namespace
}  // namespace krein
