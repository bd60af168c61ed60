// SPDX-License-Identifier: Apache-2.0
//
// Named sweep presets: flat-space and Schwarzschild field pairs.
#pragma once

#include "krein/field_analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace krein::presets
{

inline constexpr char const* kMinkowskiRestVsBoostfield
    = "minkowski-rest-vs-boostfield";
inline constexpr char const* kMinkowskiShearVsE0 = "minkowski-shear-vs-e0";
inline constexpr char const* kCovariantlyConstantPair
    = "covariantly-constant-pair";
inline constexpr char const* kSchwarzschildRadialInOut
    = "schwarzschild-radial-in-out";
inline constexpr char const* kCounterexampleBump = "counterexample-bump";
inline constexpr char const* kDivergentField = "divergent-field";

inline std::vector<std::string> sweep_preset_names()
{
    return {kMinkowskiRestVsBoostfield, kMinkowskiShearVsE0,
            kCovariantlyConstantPair, kSchwarzschildRadialInOut};
}

inline std::vector<std::string> all_preset_names()
{
    auto names = sweep_preset_names();
    names.emplace_back(kCounterexampleBump);
    names.emplace_back(kDivergentField);
    return names;
}

enum class SweepKind
{
    splittings,  //!< dsf_sweep over splitting fields
    vectors,     //!< doppler_class_check over unit timelike fields
};

/// Everything needed to run one preset sweep.
struct SweepPreset
{
    std::string name;
    SweepKind kind = SweepKind::vectors;
    MetricField metric;
    VectorField v1;
    VectorField v2;
    GridSpec grid;
    GrowthCoordinate growth;
};

inline RVec e0(int n = 4)
{
    RVec v = RVec::Zero(n);
    v(0) = 1.0;
    return v;
}

/// Grid over a 4-D box: the given axis spans [lo, hi] with `samples` nodes,
/// every other axis [0, 1] with two nodes.
inline GridSpec axis_grid(int axis, double lo, double hi, int samples)
{
    GridSpec grid;
    for (int a = 0; a < 4; ++a)
    {
        if (a == axis)
        {
            grid.bounds.emplace_back(lo, hi);
            grid.resolution.push_back(samples);
        }
        else
        {
            grid.bounds.emplace_back(0.0, 1.0);
            grid.resolution.push_back(2);
        }
    }
    return grid;
}

inline GrowthCoordinate abs_axis(int axis)
{
    return {"|x" + std::to_string(axis) + "|",
            [axis](RVec const& x) { return std::abs(x(axis)); }};
}

/// Rest frame e0 against cosh(x0) e0 + sinh(x0) e1; dsf = e^{|x0|}.
inline SweepPreset minkowski_rest_vs_boostfield(double x0_max = 5.0,
                                                int samples = 201)
{
    return {kMinkowskiRestVsBoostfield,
            SweepKind::splittings,
            constant_metric_field(minkowski_metric()),
            {[](RVec const&) { return e0(); }, "rest frame e0"},
            {[](RVec const& x) { return boost_field_vector(x(0)); },
             "cosh(x0) e0 + sinh(x0) e1"},
            axis_grid(0, -x0_max, x0_max, samples),
            abs_axis(0)};
}

/// Shear field v = cosh(x3) e0 + sinh(x3) e1 against e0.
inline SweepPreset minkowski_shear_vs_e0(double x3_lo = -5.0,
                                         double x3_hi = 5.0,
                                         int samples = 201)
{
    return {kMinkowskiShearVsE0,
            SweepKind::vectors,
            constant_metric_field(minkowski_metric()),
            {[](RVec const& x) { return boost_field_vector(x(3)); },
             "shear field cosh(x3) e0 + sinh(x3) e1"},
            {[](RVec const&) { return e0(); }, "e0"},
            axis_grid(3, x3_lo, x3_hi, samples),
            abs_axis(3)};
}

/// Two constant fields at relative rapidity xi.
inline SweepPreset covariantly_constant_pair(double xi = 0.4,
                                             double extent = 5.0,
                                             int samples = 21)
{
    GridSpec grid;
    for (int a = 0; a < 4; ++a)
    {
        grid.bounds.emplace_back(-extent, extent);
        grid.resolution.push_back(a < 2 ? samples : 3);
    }
    return {kCovariantlyConstantPair,
            SweepKind::vectors,
            constant_metric_field(minkowski_metric()),
            {[](RVec const&) { return e0(); }, "e0"},
            {[xi](RVec const&) { return boost_field_vector(xi); },
             "cosh(xi) e0 + sinh(xi) e1"},
            grid,
            abs_axis(0)};
}

//---------------------------------------------------------------------------//
// SCHWARZSCHILD
//---------------------------------------------------------------------------//

/// Exterior Schwarzschild in (t, r, theta, phi), units r_s = 1.
inline RMat schwarzschild_metric(RVec const& x)
{
    double const r = x(1);
    double const f = 1.0 - 1.0 / r;
    double const st = std::sin(x(2));
    RMat g = RMat::Zero(4, 4);
    g(0, 0) = f;
    g(1, 1) = -1.0 / f;
    g(2, 2) = -r * r;
    g(3, 3) = -r * r * st * st;
    return g;
}

/// 4-velocity of a radial geodesic of specific energy E; direction -1 in,
/// +1 out.
inline RVec schwarzschild_radial_velocity(double r, double energy,
                                          int direction)
{
    double const f = 1.0 - 1.0 / r;
    if (energy * energy < f)
        fail_input("radial geodesic with E^2 < 1 - r_s/r does not reach r = "
                   + std::to_string(r));
    RVec u = RVec::Zero(4);
    u(0) = energy / f;
    u(1) = direction * std::sqrt(energy * energy - f);
    return u;
}

/// g(u_in, u_out) = (E1 E2 + sqrt(E1^2 - f) sqrt(E2^2 - f)) / f.
inline double schwarzschild_in_out_gram(double r, double e1, double e2)
{
    double const f = 1.0 - 1.0 / r;
    return (e1 * e2 + std::sqrt(e1 * e1 - f) * std::sqrt(e2 * e2 - f)) / f;
}

inline SweepPreset schwarzschild_radial_in_out(double r_min = 1.05,
                                               double r_max = 10.0,
                                               int samples = 200,
                                               double e_in = 1.0,
                                               double e_out = 1.0)
{
    if (!(r_min > 1.0) || !(r_max > r_min))
        fail_input("Schwarzschild preset needs 1 < rmin < rmax (units of r_s)");
    MetricField mf{schwarzschild_metric,
                   [](RVec const& x) {
                       return x(1) * x(1) * std::abs(std::sin(x(2)));
                   },
                   4};
    GridSpec grid;
    grid.bounds = {{0.0, 1.0},
                   {r_min, r_max},
                   {std::numbers::pi / 4, std::numbers::pi / 2},
                   {0.0, 1.0}};
    grid.resolution = {2, samples, 2, 2};
    return {kSchwarzschildRadialInOut,
            SweepKind::vectors,
            std::move(mf),
            {[e_in](RVec const& x) {
                 return schwarzschild_radial_velocity(x(1), e_in, -1);
             },
             "radially ingoing geodesic"},
            {[e_out](RVec const& x) {
                 return schwarzschild_radial_velocity(x(1), e_out, +1);
             },
             "radially outgoing geodesic"},
            grid,
            {"-log(1 - r_s/r)",
             [](RVec const& x) { return -std::log(1.0 - 1.0 / x(1)); }}};
}

/// Runs a preset with its own growth coordinate.
inline SweepReport run_sweep(SweepPreset const& preset,
                             GridSpec const& grid, unsigned threads = 0)
{
    SweepOptions opts;
    opts.growth_coordinate = preset.growth;
    opts.threads = threads;
    if (preset.kind == SweepKind::splittings)
    {
        return dsf_sweep(preset.metric,
                         splitting_field_of(preset.metric, preset.v1),
                         splitting_field_of(preset.metric, preset.v2), grid,
                         opts);
    }
    return doppler_class_check(preset.metric, preset.v1, preset.v2, grid,
                               opts);
}

inline SweepReport run_sweep(SweepPreset const& preset, unsigned threads = 0)
{
    return run_sweep(preset, preset.grid, threads);
}

}  // namespace krein::presets
