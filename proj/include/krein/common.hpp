// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace krein
{

using Complex = std::complex<double>;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// i^r for r taken mod 4.
inline Complex i_pow(int r)
{
    switch (((r % 4) + 4) % 4)
    {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

enum class ErrorKind
{
    invalid_input,  //!< caller handed in something outside the contract
    consistency,    //!< an internal identity failed; indicates a bug
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(std::string const& msg)
{
    throw Error(ErrorKind::invalid_input, msg);
}

[[noreturn]] inline void fail_consistency(std::string const& msg)
{
    throw Error(ErrorKind::consistency, msg);
}

namespace tol
{
inline constexpr double algebra = 1e-12;     // Clifford identities, dim <= 16
inline constexpr double involution = 1e-10;  // n^2 = 1, Lambda^T g Lambda = g
inline constexpr double degeneracy = 1e-10;  // Gram-Schmidt pivots
inline constexpr double ad_compat = 1e-9;    // lift Ad-compatibility
inline constexpr double ad_fail = 1e-6;      // lift construction failure
inline constexpr double spectrum = 1e-8;     // relative eigenvalue matching
}  // namespace tol

/// Hermitian part (A + A^dagger) / 2.
template <typename Derived>
auto hermitian_part(Eigen::MatrixBase<Derived> const& a)
{
    using Plain = typename Derived::PlainObject;
    Plain h = (a + a.adjoint()) / 2.0;
    return h;
}

/// Largest absolute entry; the residual norm used throughout.
template <typename Derived>
double max_abs(Eigen::MatrixBase<Derived> const& a)
{
    if (a.size() == 0)
        return 0.0;
    return a.cwiseAbs().maxCoeff();
}

}  // namespace krein
