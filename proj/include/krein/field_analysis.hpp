// SPDX-License-Identifier: Apache-2.0
//
// Manifold layer: metric and splitting fields sampled over coordinate grids,
// pointwise Doppler shift factor sweeps with a growth diagnostic, and the
// quadratures behind the non-equivalent norms example.
#pragma once

#include "krein/common.hpp"
#include "krein/doppler.hpp"
#include "krein/krein_core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace krein
{

//---------------------------------------------------------------------------//
// FIELDS AND GRIDS
//---------------------------------------------------------------------------//

using PointFn = std::function<RMat(RVec const&)>;
using VectorFn = std::function<RVec(RVec const&)>;
using ScalarFn = std::function<double(RVec const&)>;

struct MetricField
{
    PointFn metric;
    ScalarFn volume_density;  //!< sqrt|det g| when left empty
    int dim = 4;

    double density(RVec const& x) const
    {
        if (volume_density)
            return volume_density(x);
        return std::sqrt(std::abs(metric(x).determinant()));
    }
};

inline MetricField constant_metric_field(RMat g)
{
    int const n = static_cast<int>(g.rows());
    double const density = std::sqrt(std::abs(g.determinant()));
    return {[g = std::move(g)](RVec const&) { return g; },
            [density](RVec const&) { return density; }, n};
}

/// Point -> basis of the negative definite subspace V(x).
struct SplittingField
{
    PointFn basis;
    std::string label;
};

struct VectorField
{
    VectorFn value;
    std::string label;
};

/// Splitting field whose V(x)^perp is spanned by a timelike vector field.
inline SplittingField splitting_field_of(MetricField const& mf,
                                         VectorField const& v)
{
    return {[mf, v](RVec const& x) {
                MetricSpace const ms = make_metric_space(mf.metric(x));
                return splitting_from_timelike(ms, v.value(x)).basis_V;
            },
            v.label};
}

struct GridSpec
{
    std::vector<std::pair<double, double>> bounds;
    std::vector<int> resolution;

    int dim() const { return static_cast<int>(bounds.size()); }

    std::size_t size() const
    {
        std::size_t total = 1;
        for (int r : resolution)
            total *= static_cast<std::size_t>(r);
        return total;
    }

    /// Inclusive linspace per axis; last axis varies fastest.
    RVec point(std::size_t index) const
    {
        RVec x(dim());
        for (int a = dim() - 1; a >= 0; --a)
        {
            auto const r = static_cast<std::size_t>(resolution[a]);
            std::size_t const i = index % r;
            index /= r;
            auto const [lo, hi] = bounds[a];
            x(a) = lo + (hi - lo) * static_cast<double>(i)
                            / static_cast<double>(r - 1);
        }
        return x;
    }

    /// Same bounds, resolution (r - 1) * 2 + 1 on every axis: doubles the
    /// sample density and keeps the old nodes.
    GridSpec refined() const
    {
        GridSpec out = *this;
        for (int& r : out.resolution)
            r = 2 * (r - 1) + 1;
        return out;
    }
};

inline void validate(GridSpec const& grid)
{
    if (grid.bounds.empty() || grid.bounds.size() != grid.resolution.size())
        fail_input("grid needs one [min,max] and one resolution per axis");
    for (std::size_t a = 0; a < grid.bounds.size(); ++a)
    {
        auto const [lo, hi] = grid.bounds[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
            fail_input("grid axis " + std::to_string(a)
                       + " has invalid bounds");
        if (grid.resolution[a] < 2)
            fail_input("grid axis " + std::to_string(a)
                       + " needs resolution >= 2");
    }
}

inline std::string format_point(RVec const& x)
{
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i)
        os << (i ? ", " : "") << x(i);
    os << ")";
    return os.str();
}

namespace detail
{
/*!
 * Evaluates fn(i) for i < count on worker threads. Results are stored by
 * index; the first failing index (lowest) is rethrown.
 */
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&](unsigned t) {
        for (std::size_t i = t; i < count; i += threads)
        {
            try
            {
                fn(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1)
    {
        worker(0);
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker, t);
    }
    for (auto const& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
// GROWTH DIAGNOSTIC
//---------------------------------------------------------------------------//

struct GrowthCoordinate
{
    std::string name;
    ScalarFn value;
};

struct LinearFit
{
    std::string coordinate;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;     //!< RMS residual / range of the fitted data
    double correlation = 0.0;
};

/// Least-squares y = slope * x + intercept.
inline LinearFit fit_line(std::vector<double> const& x,
                          std::vector<double> const& y, std::string name)
{
    LinearFit fit;
    fit.coordinate = std::move(name);
    std::size_t const n = x.size();
    if (n < 2)
        return fit;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.correlation = (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;

    auto const [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    double const range = *ymax - *ymin;
    if (range < 1e-12)
        return fit;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / double(n)) / range;
    return fit;
}

enum class Verdict
{
    bounded_on_domain,
    growth_detected,
};

inline char const* to_string(Verdict v)
{
    return v == Verdict::growth_detected ? "GROWTH_DETECTED"
                                         : "BOUNDED_ON_DOMAIN";
}

struct SweepOptions
{
    double slope_threshold = 0.05;
    double residual_cap = 0.1;
    std::optional<GrowthCoordinate> growth_coordinate;
    unsigned threads = 0;
};

struct SweepSample
{
    RVec point;
    double dsf = 1.0;
    double rapidity = 0.0;
    double g_v1v2 = std::numeric_limits<double>::quiet_NaN();
};

struct SweepReport
{
    std::vector<SweepSample> samples;
    double sup_dsf = 1.0;
    RVec argsup;
    std::optional<double> sup_g_v1v2;
    std::optional<double> max_pointwise_discrepancy;
    LinearFit growth_fit;
    std::vector<LinearFit> axis_fits;
    Verdict verdict = Verdict::bounded_on_domain;
};

namespace detail
{
inline void finish_report(SweepReport& rep, GridSpec const& grid,
                          SweepOptions const& opts)
{
    rep.sup_dsf = 1.0;
    rep.argsup = rep.samples.empty() ? RVec() : rep.samples.front().point;
    for (auto const& s : rep.samples)
    {
        if (s.dsf > rep.sup_dsf)
        {
            rep.sup_dsf = s.dsf;
            rep.argsup = s.point;
        }
    }

    std::vector<double> y;
    y.reserve(rep.samples.size());
    for (auto const& s : rep.samples)
        y.push_back(std::log(s.dsf));

    auto feature = [&](auto&& fn) {
        std::vector<double> x;
        x.reserve(rep.samples.size());
        for (auto const& s : rep.samples)
            x.push_back(fn(s.point));
        return x;
    };

    rep.axis_fits.clear();
    for (int a = 0; a < grid.dim(); ++a)
    {
        if (grid.bounds[a].second <= grid.bounds[a].first)
            continue;
        double const centre
            = 0.5 * (grid.bounds[a].first + grid.bounds[a].second);
        std::string const axis = "x" + std::to_string(a);
        rep.axis_fits.push_back(fit_line(
            feature([a](RVec const& x) { return x(a); }), y, axis));
        rep.axis_fits.push_back(
            fit_line(feature([a, centre](RVec const& x) {
                         return std::abs(x(a) - centre);
                     }),
                     y, "|" + axis + " - centre|"));
    }

    if (opts.growth_coordinate)
    {
        rep.growth_fit = fit_line(feature(opts.growth_coordinate->value), y,
                                  opts.growth_coordinate->name);
    }
    else
    {
        rep.growth_fit = LinearFit{};
        for (auto const& fit : rep.axis_fits)
        {
            if (std::abs(fit.correlation)
                > std::abs(rep.growth_fit.correlation))
                rep.growth_fit = fit;
        }
        if (rep.growth_fit.coordinate.empty() && !rep.axis_fits.empty())
            rep.growth_fit = rep.axis_fits.front();
    }

    bool const growth = rep.growth_fit.slope > opts.slope_threshold
                        && rep.growth_fit.residual <= opts.residual_cap;
    rep.verdict = growth ? Verdict::growth_detected
                         : Verdict::bounded_on_domain;
}

inline MetricSpace metric_at(MetricField const& mf, RVec const& x,
                             Signature const* expected)
{
    MetricSpace ms = make_metric_space(mf.metric(x));
    if (expected != nullptr && !(ms.sig == *expected))
        fail_input("metric signature changes across the domain at "
                   + format_point(x));
    return ms;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// SWEEPS
//---------------------------------------------------------------------------//

/// Pointwise dsf(V1(x), V2(x)) over the grid, with growth fits and verdict.
inline SweepReport dsf_sweep(MetricField const& mf, SplittingField const& f1,
                             SplittingField const& f2, GridSpec const& grid,
                             SweepOptions const& opts = {})
{
    validate(grid);
    if (grid.dim() != mf.dim)
        fail_input("grid dimension does not match metric field");
    Signature const sig = make_metric_space(mf.metric(grid.point(0))).sig;

    SweepReport rep;
    rep.samples.resize(grid.size());
    detail::parallel_for(
        grid.size(),
        [&](std::size_t i) {
            RVec const x = grid.point(i);
            try
            {
                MetricSpace const ms = detail::metric_at(mf, x, &sig);
                Splitting const s1 = make_splitting(ms, f1.basis(x));
                Splitting const s2 = make_splitting(ms, f2.basis(x));
                DSFResult const d = dsf(ms, s1, s2);
                rep.samples[i] = {x, d.dsf, d.rapidity};
            }
            catch (Error const& e)
            {
                throw Error(e.kind(), std::string(e.what())
                                          + " at sample point "
                                          + format_point(x));
            }
        },
        opts.threads);
    detail::finish_report(rep, grid, opts);
    return rep;
}

/*!
 * Doppler class check of two unit timelike co-oriented vector fields in a
 * Lorentzian metric field: g(v1,v2) and the closed-form dsf per sample, plus
 * the splitting-path dsf as a pointwise consistency check.
 */
inline SweepReport doppler_class_check(MetricField const& mf,
                                       VectorField const& v1,
                                       VectorField const& v2,
                                       GridSpec const& grid,
                                       SweepOptions const& opts = {})
{
    validate(grid);
    if (grid.dim() != mf.dim)
        fail_input("grid dimension does not match metric field");
    Signature const sig = make_metric_space(mf.metric(grid.point(0))).sig;
    if (sig.p != 1)
        fail_input("Doppler classes need a Lorentzian (1,n-1) metric, got "
                   + sig.str());

    SweepReport rep;
    rep.samples.resize(grid.size());
    std::vector<double> discrepancy(grid.size(), 0.0);
    detail::parallel_for(
        grid.size(),
        [&](std::size_t i) {
            RVec const x = grid.point(i);
            MetricSpace const ms = detail::metric_at(mf, x, &sig);
            RVec const a = v1.value(x);
            RVec const b = v2.value(x);
            for (RVec const* v : {&a, &b})
            {
                double const vv = inner(ms, *v, *v);
                if (std::abs(vv - 1.0) > 1e-9 * std::max(1.0, v->squaredNorm()))
                    fail_input("non-timelike or non-unit sample (g(v,v) = "
                               + std::to_string(vv) + ") at "
                               + format_point(x));
            }
            double const gab = inner(ms, a, b);
            if (gab < 1.0 - 1e-9 * std::max(1.0, a.norm() * b.norm()))
                fail_input("vector fields are not co-oriented timelike "
                           "(g(v1,v2) = "
                           + std::to_string(gab) + ") at " + format_point(x));
            double const c = std::max(1.0, gab);
            double const closed = dsf_lorentzian(c);

            Splitting const s1 = splitting_from_timelike(ms, a);
            Splitting const s2 = splitting_from_timelike(ms, b);
            double const path = dsf(ms, s1, s2).dsf;
            discrepancy[i] = std::abs(path - closed);
            rep.samples[i] = {x, closed, std::log(closed), c};
        },
        opts.threads);

    rep.sup_g_v1v2 = 1.0;
    rep.max_pointwise_discrepancy = 0.0;
    for (std::size_t i = 0; i < rep.samples.size(); ++i)
    {
        rep.sup_g_v1v2 = std::max(*rep.sup_g_v1v2, rep.samples[i].g_v1v2);
        rep.max_pointwise_discrepancy
            = std::max(*rep.max_pointwise_discrepancy, discrepancy[i]);
    }
    detail::finish_report(rep, grid, opts);
    return rep;
}

//---------------------------------------------------------------------------//
// QUADRATURE: NON-EQUIVALENT NORMS IN MINKOWSKI SPACE
//---------------------------------------------------------------------------//

/// Minkowski (1,3) with metric diag(1,-1,-1,-1).
inline RMat minkowski_metric(int n = 4)
{
    RMat g = -RMat::Identity(n, n);
    g(0, 0) = 1.0;
    return g;
}

/// Unit timelike field cosh(x0) e0 + sinh(x0) e1.
inline RVec boost_field_vector(double x0, int n = 4)
{
    RVec v = RVec::Zero(n);
    v(0) = std::cosh(x0);
    v(1) = std::sinh(x0);
    return v;
}

struct CounterexampleNorms
{
    double eta_norm_sq = 0.0;
    double n_norm_sq = 0.0;
    double outside_mass = 0.0;  //!< bump mass outside the grid
    std::size_t nodes = 0;
};

/*!
 * Squared eta- and n-norms of the spinor field phi^{1/2}(x - y) eps_1 with a
 * normalized Gaussian bump of standard deviation `width` centred at y0 on
 * the x0 axis. The spatial factors integrate to one analytically; the x0
 * integral uses the midpoint rule over the given 1-D grid, with the
 * integrand eps_1^+ H n(x) eps_1 evaluated through the Krein-space layer.
 */
inline CounterexampleNorms counterexample_norms(double y0, double width,
                                                GridSpec const& grid)
{
    validate(grid);
    if (grid.dim() != 1)
        fail_input("counterexample quadrature takes a 1-D grid in x0");
    if (!(width > 0.0))
        fail_input("bump width must be positive");

    auto const [lo, hi] = grid.bounds.front();
    double const root2 = std::numbers::sqrt2 * width;
    CounterexampleNorms out;
    out.outside_mass = 0.5 * std::erfc((y0 - lo) / root2)
                       + 0.5 * std::erfc((hi - y0) / root2);
    if (out.outside_mass > 1e-6)
        fail_input("bump mass outside the grid is "
                   + std::to_string(out.outside_mass) + " (> 1e-6)");

    KreinProductSpace const space = make_krein_space(Signature{1, 3});
    MetricSpace const ms = make_metric_space(space.rep);
    FundSym const eta = fundamental_symmetry(space, reference_splitting(ms));
    MetricField const mf = constant_metric_field(ms.g);
    CVec eps1 = CVec::Zero(space.dim_spinor());
    eps1(0) = 1.0;

    auto const cells = static_cast<std::size_t>(grid.resolution.front());
    double const h = (hi - lo) / static_cast<double>(cells);
    double const norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
    std::vector<double> eta_terms(cells), n_terms(cells);
    detail::parallel_for(cells, [&](std::size_t i) {
        double const x0 = lo + (static_cast<double>(i) + 0.5) * h;
        double const z = (x0 - y0) / width;
        RVec point = RVec::Zero(4);
        point(0) = x0;
        double const weight
            = norm * std::exp(-0.5 * z * z) * mf.density(point) * h;
        FundSym const n_x = fundamental_symmetry(
            space, splitting_from_timelike(ms, boost_field_vector(x0)));
        eta_terms[i] = weight * scalar_product(space, eta, eps1, eps1).real();
        n_terms[i] = weight * scalar_product(space, n_x, eps1, eps1).real();
    });
    for (std::size_t i = 0; i < cells; ++i)
    {
        out.eta_norm_sq += eta_terms[i];
        out.n_norm_sq += n_terms[i];
    }
    out.nodes = cells;
    return out;
}

/// Grid of 2001 midpoint cells over y0 +- 8 width.
inline GridSpec bump_grid(double y0, double width, int cells = 2001)
{
    return {{{y0 - 8.0 * width, y0 + 8.0 * width}}, {cells}};
}

//---------------------------------------------------------------------------//
// DIVERGENT FIELD
//---------------------------------------------------------------------------//

namespace detail
{
/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int n)
{
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i)
    {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k)
            {
                double const p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0)
                                  / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double const dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// Composite Gauss-Legendre of fn over [a, b] with unit-length panels.
template <typename Fn>
double integrate(Fn&& fn, double a, double b, int order = 12)
{
    static auto const rule = gauss_legendre(order);
    int const panels = std::max(1, static_cast<int>(std::ceil(b - a)));
    double const h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p)
    {
        double const mid = a + (p + 0.5) * h;
        for (int k = 0; k < order; ++k)
            total += rule.second[k] * fn(mid + 0.5 * h * rule.first[k]);
    }
    return 0.5 * h * total;
}
}  // namespace detail

struct DivergentRow
{
    double X = 0.0;
    double eta_partial = 0.0;  //!< int_{|x0|<=X} e^{-|x0|}
    double n_partial = 0.0;    //!< int_{|x0|<=X} e^{-|x0|} cosh x0
};

struct DivergentFieldReport
{
    std::vector<DivergentRow> rows;
    LinearFit eta_fit;  //!< eta_partial against X over the fit window
    LinearFit n_fit;    //!< n_partial against X over the fit window
    bool eta_converges = true;
    bool n_converges = false;
};

/*!
 * Partial integrals of the squared eta- and n-norms of a field decaying as
 * e^{-|x0|/2}, for X = step, 2 step, ..., X_max, with linear growth fits of
 * both against X on [fit_lo, fit_hi].
 */
inline DivergentFieldReport divergent_field_demo(double x_max,
                                                 double step = 0.5,
                                                 double fit_lo = 5.0,
                                                 double fit_hi = 20.0,
                                                 double slope_threshold = 0.05)
{
    if (!(x_max > 0.0))
        fail_input("X_max must be positive");
    if (!(step > 0.0))
        fail_input("step must be positive");

    DivergentFieldReport rep;
    auto const eta_density = [](double t) { return std::exp(-t); };
    auto const n_density
        = [](double t) { return std::exp(-t) * std::cosh(t); };
    int const count = static_cast<int>(std::floor(x_max / step + 1e-9));
    for (int k = 1; k <= count; ++k)
    {
        double const x = k * step;
        rep.rows.push_back(
            {x, 2.0 * detail::integrate(eta_density, 0.0, x),
             2.0 * detail::integrate(n_density, 0.0, x)});
    }
    if (rep.rows.empty() || rep.rows.back().X < x_max - 1e-12)
    {
        rep.rows.push_back(
            {x_max, 2.0 * detail::integrate(eta_density, 0.0, x_max),
             2.0 * detail::integrate(n_density, 0.0, x_max)});
    }

    std::vector<double> xs, ye, yn;
    double const hi = std::min(fit_hi, x_max);
    double const lo = std::min(fit_lo, 0.25 * hi);
    for (auto const& row : rep.rows)
    {
        if (row.X >= lo - 1e-12 && row.X <= hi + 1e-12)
        {
            xs.push_back(row.X);
            ye.push_back(row.eta_partial);
            yn.push_back(row.n_partial);
        }
    }
    rep.eta_fit = fit_line(xs, ye, "X");
    rep.n_fit = fit_line(xs, yn, "X");
    rep.eta_converges = !(rep.eta_fit.slope > slope_threshold);
    rep.n_converges = !(rep.n_fit.slope > slope_threshold);
    return rep;
}

}  // namespace krein
