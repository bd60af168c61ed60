// SPDX-License-Identifier: Apache-2.0
//
// Gamma-matrix representations of Cl(p,q) for even p+q, built from iterated
// 2x2 tensor products, and the spinor metric H with H gamma_mu = gamma_mu^+ H.
#pragma once

#include "krein/common.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace krein
{

/// Metric signature: p directions with g = +1, q with g = -1.
struct Signature
{
    int p = 0;
    int q = 0;

    int dim() const { return p + q; }

    friend bool operator==(Signature const&, Signature const&) = default;

    std::string str() const
    {
        return "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    }
};

inline void validate(Signature const& sig)
{
    if (sig.p < 0 || sig.q < 0)
        fail_input("signature counts must be non-negative");
    if (sig.dim() % 2 != 0)
        fail_input("even dimension only: signature " + sig.str()
                   + " has odd total dimension");
    if (sig.dim() < 2)
        fail_input("signature " + sig.str() + " must have p+q >= 2");
}

/*!
 * Default diagonal of g for a signature: min(p,q) couples (+1,-1), then the
 * surplus sign. (1,3) -> (+,-,-,-); (2,2) -> (+,-,+,-); (3,1) -> (+,-,+,+).
 */
inline std::vector<int> default_metric_signs(Signature const& sig)
{
    std::vector<int> signs;
    int const couples = std::min(sig.p, sig.q);
    for (int k = 0; k < couples; ++k)
    {
        signs.push_back(+1);
        signs.push_back(-1);
    }
    for (int k = couples; k < sig.p; ++k)
        signs.push_back(+1);
    for (int k = couples; k < sig.q; ++k)
        signs.push_back(-1);
    return signs;
}

inline Signature signature_of(std::span<int const> signs)
{
    Signature sig;
    for (int s : signs)
    {
        if (s == 1)
            ++sig.p;
        else if (s == -1)
            ++sig.q;
        else
            fail_input("metric signs must be +1 or -1");
    }
    return sig;
}

struct GammaRep
{
    Signature sig;
    int dim_spinor = 0;
    std::vector<CMat> gammas;
    std::vector<int> metric_signs;

    int dim() const { return static_cast<int>(gammas.size()); }

    RMat metric() const
    {
        RMat g = RMat::Zero(dim(), dim());
        for (int mu = 0; mu < dim(); ++mu)
            g(mu, mu) = metric_signs[mu];
        return g;
    }

    CMat identity() const { return CMat::Identity(dim_spinor, dim_spinor); }
};

struct SpinorMetric
{
    CMat H;
    int candidate = 0;  //!< 0: product of +1 generators, 1: of -1 generators
    int r_phase = 0;
};

namespace detail
{
inline CMat pauli(char which)
{
    CMat m = CMat::Zero(2, 2);
    switch (which)
    {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -kI, kI, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
    }
    return m;
}

inline CMat kron(CMat const& a, CMat const& b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols())
                = a(i, j) * b;
    return out;
}

inline CMat pauli_string(std::string const& word)
{
    CMat out = CMat::Identity(1, 1);
    for (char c : word)
        out = kron(out, pauli(c));
    return out;
}
}  // namespace detail

/*!
 * Build an irreducible representation for an explicit diagonal metric.
 *
 * Euclidean generators on m = n/2 qubits: gamma_{2k} = X^{(k)} Z I..,
 * gamma_{2k+1} = X^{(k)} Y I.. (X^{(k)} = k leading X factors). These are
 * Hermitian, square to one and pairwise anticommute. Generators with a -1
 * metric sign are multiplied by i and become anti-Hermitian.
 */
inline GammaRep build_gamma_rep(std::span<int const> metric_signs)
{
    Signature const sig = signature_of(metric_signs);
    validate(sig);

    int const n = sig.dim();
    int const m = n / 2;

    GammaRep rep;
    rep.sig = sig;
    rep.dim_spinor = 1 << m;
    rep.metric_signs.assign(metric_signs.begin(), metric_signs.end());
    rep.gammas.reserve(n);
    for (int mu = 0; mu < n; ++mu)
    {
        int const site = mu / 2;
        std::string word(static_cast<std::size_t>(m), 'I');
        for (int j = 0; j < site; ++j)
            word[j] = 'X';
        word[site] = (mu % 2 == 0) ? 'Z' : 'Y';
        CMat gamma = detail::pauli_string(word);
        if (metric_signs[mu] < 0)
            gamma *= kI;
        rep.gammas.push_back(std::move(gamma));
    }
    return rep;
}

inline GammaRep build_gamma_rep(Signature const& sig)
{
    validate(sig);
    auto const signs = default_metric_signs(sig);
    return build_gamma_rep(std::span<int const>(signs));
}

/// Clifford action of the vector with coordinates v: sum_mu v^mu gamma_mu.
template <typename Derived>
CMat clifford_vector(GammaRep const& rep, Eigen::MatrixBase<Derived> const& v)
{
    if (v.size() != rep.dim())
        fail_input("vector dimension does not match representation");
    CMat out = CMat::Zero(rep.dim_spinor, rep.dim_spinor);
    for (int mu = 0; mu < rep.dim(); ++mu)
        out += Complex(v(mu)) * rep.gammas[mu];
    return out;
}

/// scale * gamma_{i1} ... gamma_{ik}; indices strictly increasing.
inline CMat multivector_action(GammaRep const& rep,
                               std::span<int const> blade,
                               Complex scale = 1.0)
{
    CMat out = rep.identity();
    int prev = -1;
    for (int idx : blade)
    {
        if (idx < 0 || idx >= rep.dim())
            fail_input("blade index " + std::to_string(idx)
                       + " out of range");
        if (idx <= prev)
            fail_input("blade indices must be strictly increasing");
        prev = idx;
        out = out * rep.gammas[idx];
    }
    return scale * out;
}

inline CMat multivector_action(GammaRep const& rep,
                               std::initializer_list<int> blade,
                               Complex scale = 1.0)
{
    return multivector_action(
        rep, std::span<int const>(blade.begin(), blade.size()), scale);
}

/// max over mu, nu of || {gamma_mu, gamma_nu} - 2 g_{mu nu} I ||_F.
inline double anticommutator_residual(GammaRep const& rep)
{
    double worst = 0.0;
    CMat const id = rep.identity();
    for (int mu = 0; mu < rep.dim(); ++mu)
    {
        for (int nu = mu; nu < rep.dim(); ++nu)
        {
            CMat ac = rep.gammas[mu] * rep.gammas[nu]
                      + rep.gammas[nu] * rep.gammas[mu];
            if (mu == nu)
                ac -= 2.0 * rep.metric_signs[mu] * id;
            worst = std::max(worst, ac.norm());
        }
    }
    return worst;
}

/// Deviation from gamma^+ = +gamma (g=+1) / -gamma (g=-1).
inline double hermiticity_residual(GammaRep const& rep)
{
    double worst = 0.0;
    for (int mu = 0; mu < rep.dim(); ++mu)
    {
        CMat const& gm = rep.gammas[mu];
        CMat const d = gm.adjoint() - double(rep.metric_signs[mu]) * gm;
        worst = std::max(worst, d.norm());
    }
    return worst;
}

struct SpinorMetricResiduals
{
    double hermitian = 0;     //!< ||H - H^+||
    double intertwining = 0;  //!< max_mu ||H gamma_mu - gamma_mu^+ H||
    double min_singular = 0;
};

inline SpinorMetricResiduals spinor_metric_residuals(GammaRep const& rep,
                                                     CMat const& H)
{
    SpinorMetricResiduals res;
    res.hermitian = (H - H.adjoint()).norm();
    for (auto const& gm : rep.gammas)
    {
        res.intertwining
            = std::max(res.intertwining, (H * gm - gm.adjoint() * H).norm());
    }
    Eigen::JacobiSVD<CMat> svd(H);
    res.min_singular = svd.singularValues().minCoeff();
    return res;
}

/*!
 * Spinor metric by bounded search: A = product of the +1 generators, then
 * B = product of the -1 generators, each times i^r for r = 0..3. The first
 * Hermitian candidate satisfying H gamma_mu = gamma_mu^+ H is returned.
 */
inline SpinorMetric build_spinor_metric(GammaRep const& rep)
{
    std::vector<int> plus, minus;
    for (int mu = 0; mu < rep.dim(); ++mu)
        (rep.metric_signs[mu] > 0 ? plus : minus).push_back(mu);

    std::vector<int> const* blades[2] = {&plus, &minus};
    for (int cand = 0; cand < 2; ++cand)
    {
        CMat const base = multivector_action(rep, *blades[cand]);
        for (int r = 0; r < 4; ++r)
        {
            CMat const H = i_pow(r) * base;
            auto const res = spinor_metric_residuals(rep, H);
            if (res.hermitian <= tol::algebra
                && res.intertwining <= tol::algebra
                && res.min_singular > tol::algebra)
            {
                return {H, cand, r};
            }
        }
    }
    fail_consistency("no spinor metric candidate passed for signature "
                     + rep.sig.str());
}

}  // namespace krein
