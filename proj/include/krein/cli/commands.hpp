// SPDX-License-Identifier: Apache-2.0
//
// kreinctl command runners. Each command takes a validated JSON config and
// produces a report payload, a list of numeric checks and optional CSV.
#pragma once

#include "krein/cli/report.hpp"
#include "krein/clifford_rep.hpp"
#include "krein/doppler.hpp"
#include "krein/field_analysis.hpp"
#include "krein/field_presets.hpp"
#include "krein/krein_core.hpp"
#include "krein/sampling.hpp"
#include "krein/spin_lift.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace krein::cli
{

using report::Check;
using report::Json;

enum ExitCode : int
{
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitInvalidInput = 2,
    kExitInternal = 3,
};

struct RunConfig
{
    std::string command;
    Json config = Json::object();
    std::uint64_t seed = sampling::kDefaultSeed;
    bool timing = false;
};

struct CommandOutput
{
    Json results = Json::object();
    std::vector<Check> checks;
    std::string csv;
};

struct CommandResult
{
    Json report;
    int exit_code = kExitOk;
    std::string csv;
};

inline std::vector<std::string> command_names()
{
    return {"rep", "dsf", "liftnorm", "sweep", "counterexample", "props"};
}

//---------------------------------------------------------------------------//
// CONFIG HELPERS
//---------------------------------------------------------------------------//

namespace detail
{
inline void require_keys(Json const& cfg, std::set<std::string> const& allowed,
                         std::string const& where)
{
    if (!cfg.is_object())
        fail_input(where + " must be a JSON object");
    for (auto const& item : cfg.items())
    {
        if (!allowed.count(item.key()))
            fail_input("unknown key '" + item.key() + "' in " + where);
    }
}

inline double get_number(Json const& cfg, char const* key, double fallback)
{
    if (!cfg.contains(key))
        return fallback;
    if (!cfg[key].is_number())
        fail_input(std::string("'") + key + "' must be a number");
    return cfg[key].get<double>();
}

inline int get_int(Json const& cfg, char const* key, int fallback)
{
    if (!cfg.contains(key))
        return fallback;
    if (!cfg[key].is_number_integer())
        fail_input(std::string("'") + key + "' must be an integer");
    return cfg[key].get<int>();
}

inline bool get_bool(Json const& cfg, char const* key, bool fallback)
{
    if (!cfg.contains(key))
        return fallback;
    if (!cfg[key].is_boolean())
        fail_input(std::string("'") + key + "' must be a boolean");
    return cfg[key].get<bool>();
}

inline std::vector<double> get_numbers(Json const& cfg, char const* key,
                                       std::vector<double> fallback)
{
    if (!cfg.contains(key))
        return fallback;
    Json const& j = cfg[key];
    if (j.is_number())
        return {j.get<double>()};
    if (!j.is_array())
        fail_input(std::string("'") + key + "' must be a number list");
    std::vector<double> out;
    for (auto const& x : j)
    {
        if (!x.is_number())
            fail_input(std::string("'") + key + "' must be a number list");
        out.push_back(x.get<double>());
    }
    return out;
}

inline Signature get_signature(Json const& cfg)
{
    if (cfg.contains("metric_signs"))
    {
        std::vector<int> signs;
        for (auto const& s : cfg["metric_signs"])
        {
            if (!s.is_number_integer())
                fail_input("'metric_signs' must be a list of +1/-1");
            signs.push_back(s.get<int>());
        }
        return signature_of(signs);
    }
    if (!cfg.contains("p") || !cfg.contains("q"))
        fail_input("signature needs 'p' and 'q' (or 'metric_signs')");
    return {get_int(cfg, "p", 0), get_int(cfg, "q", 0)};
}

inline GammaRep get_rep(Json const& cfg)
{
    if (cfg.contains("metric_signs"))
    {
        std::vector<int> signs;
        for (auto const& s : cfg["metric_signs"])
        {
            if (!s.is_number_integer())
                fail_input("'metric_signs' must be a list of +1/-1");
            signs.push_back(s.get<int>());
        }
        return build_gamma_rep(std::span<int const>(signs));
    }
    return build_gamma_rep(get_signature(cfg));
}

inline GridSpec get_grid(Json const& j)
{
    require_keys(j, {"bounds", "resolution"}, "grid");
    if (!j.contains("bounds") || !j.contains("resolution"))
        fail_input("grid needs 'bounds' and 'resolution'");
    GridSpec grid;
    for (auto const& b : j["bounds"])
    {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number()
            || !b[1].is_number())
            fail_input("grid bounds must be [min, max] pairs");
        grid.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
    }
    for (auto const& r : j["resolution"])
    {
        if (!r.is_number_integer())
            fail_input("grid resolution entries must be integers");
        grid.resolution.push_back(r.get<int>());
    }
    validate(grid);
    return grid;
}

/// "lo:hi:N" axis range syntax used by sweep flags.
inline Json parse_range(std::string const& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() != 3)
        fail_input("range '" + text + "' must look like lo:hi:N");
    try
    {
        double const lo = std::stod(parts[0]);
        double const hi = std::stod(parts[1]);
        int const n = std::stoi(parts[2]);
        return Json::array({lo, hi, n});
    }
    catch (std::exception const&)
    {
        fail_input("range '" + text + "' must look like lo:hi:N");
    }
}

inline void range_from(Json const& params, char const* key, double& lo,
                       double& hi, int& n)
{
    if (!params.contains(key))
        return;
    Json const& r = params[key];
    if (!r.is_array() || r.size() != 3 || !r[0].is_number()
        || !r[1].is_number() || !r[2].is_number_integer())
        fail_input(std::string("'") + key + "' must be [lo, hi, N]");
    lo = r[0].get<double>();
    hi = r[1].get<double>();
    n = r[2].get<int>();
}

inline double relative(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}
}  // namespace detail

//---------------------------------------------------------------------------//
// rep
//---------------------------------------------------------------------------//

inline CommandOutput cmd_rep(Json const& cfg)
{
    detail::require_keys(cfg, {"p", "q", "metric_signs", "tolerances"},
                         "rep config");
    GammaRep const rep = detail::get_rep(cfg);
    KreinProductSpace const space = make_krein_space(rep);
    MetricSpace const ms = make_metric_space(rep);
    FundSym const fs = fundamental_symmetry(space, reference_splitting(ms));
    auto const hres = spinor_metric_residuals(rep, space.H());

    CommandOutput out;
    Json gammas = Json::array();
    for (auto const& gm : rep.gammas)
        gammas.push_back(report::encode(gm));
    out.results = Json{{"signature", report::encode(rep.sig)},
                       {"metric_signs", rep.metric_signs},
                       {"dim_spinor", rep.dim_spinor},
                       {"spinor_metric",
                        {{"candidate", space.metric.candidate == 0
                                           ? "product of +1 generators"
                                           : "product of -1 generators"},
                         {"r_phase", space.metric.r_phase},
                         {"H", report::encode(space.H())}}},
                       {"reference_fundamental_symmetry",
                        {{"frame_side", to_string(fs.side)},
                         {"r_phase", fs.r_phase},
                         {"n", report::encode(fs.n)}}},
                       {"gammas", gammas}};
    out.checks = {
        {"anticommutator_residual", anticommutator_residual(rep), 1e-12},
        {"gamma_hermiticity_residual", hermiticity_residual(rep), 1e-12},
        {"H_hermitian_residual", hres.hermitian, 1e-12},
        {"H_intertwining_residual", hres.intertwining, 1e-12},
        {"H_min_singular_value", hres.min_singular, 1e-12, true},
    };
    return out;
}

//---------------------------------------------------------------------------//
// dsf / liftnorm shared setup
//---------------------------------------------------------------------------//

namespace detail
{
struct PairSetup
{
    MetricSpace ms;
    Splitting split1;
    Splitting split2;
    std::optional<GammaRep> rep;  //!< set when the metric is a sign diagonal
    bool lorentzian_vectors = false;
    RVec v1, v2;
};

inline std::set<std::string> pair_keys()
{
    return {"p",  "q",  "metric_signs", "metric", "V1", "V2",
            "boost_rapidities", "timelike", "tolerances"};
}

inline PairSetup pair_setup(Json const& cfg)
{
    PairSetup ps{};
    if (cfg.contains("metric"))
    {
        if (cfg.contains("p") || cfg.contains("metric_signs"))
            fail_input("give either 'metric' or a signature, not both");
        ps.ms = make_metric_space(report::decode_matrix(cfg["metric"],
                                                        "metric"));
        if (ps.ms.g.isDiagonal() && ps.ms.g.cwiseAbs().isApprox(
                RMat::Identity(ps.ms.dim(), ps.ms.dim())))
        {
            std::vector<int> signs;
            for (int i = 0; i < ps.ms.dim(); ++i)
                signs.push_back(ps.ms.g(i, i) > 0 ? 1 : -1);
            if (ps.ms.dim() % 2 == 0)
                ps.rep = build_gamma_rep(std::span<int const>(signs));
        }
    }
    else
    {
        ps.rep = get_rep(cfg);
        ps.ms = make_metric_space(*ps.rep);
    }

    if (cfg.contains("timelike"))
    {
        Json const& t = cfg["timelike"];
        require_keys(t, {"v1", "v2"}, "'timelike'");
        if (!t.contains("v1") || !t.contains("v2"))
            fail_input("'timelike' needs 'v1' and 'v2'");
        if (cfg.contains("V1") || cfg.contains("V2")
            || cfg.contains("boost_rapidities"))
            fail_input("'timelike' excludes 'V1', 'V2' and "
                       "'boost_rapidities'");
        ps.v1 = report::decode_vector(t["v1"], "timelike.v1");
        ps.v2 = report::decode_vector(t["v2"], "timelike.v2");
        ps.split1 = splitting_from_timelike(ps.ms, ps.v1);
        ps.split2 = splitting_from_timelike(ps.ms, ps.v2);
        ps.lorentzian_vectors = true;
        return ps;
    }

    ps.split1 = cfg.contains("V1")
                    ? make_splitting(ps.ms,
                                     report::decode_matrix(cfg["V1"], "V1"))
                    : reference_splitting(ps.ms);
    if (cfg.contains("boost_rapidities"))
    {
        if (cfg.contains("V2"))
            fail_input("give either 'V2' or 'boost_rapidities'");
        auto const rap = get_numbers(cfg, "boost_rapidities", {});
        if (!ps.ms.g.isDiagonal())
            fail_input("'boost_rapidities' needs a diagonal metric");
        RMat const boost = q_boost(ps.ms.sig, rap);
        if ((boost.transpose() * ps.ms.g * boost - ps.ms.g).norm() > 1e-9
                                                                 * boost.squaredNorm())
            fail_input("'boost_rapidities' needs the interleaved metric "
                       "ordering (+,-,+,-,...)");
        ps.split2 = transform_splitting(ps.ms, boost, ps.split1);
    }
    else
    {
        ps.split2 = cfg.contains("V2")
                        ? make_splitting(ps.ms, report::decode_matrix(
                                                    cfg["V2"], "V2"))
                        : reference_splitting(ps.ms);
    }
    if (ps.ms.sig.p == 1)
    {
        ps.v1 = ps.split1.basis_perp.col(0);
        ps.v2 = ps.split2.basis_perp.col(0);
        if (inner(ps.ms, ps.v1, ps.v2) < 0)
            ps.v2 = -ps.v2;
        ps.lorentzian_vectors = true;
    }
    return ps;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// dsf
//---------------------------------------------------------------------------//

inline CommandOutput cmd_dsf(Json const& cfg)
{
    detail::require_keys(cfg, detail::pair_keys(), "dsf config");
    auto const ps = detail::pair_setup(cfg);
    DSFResult const d = dsf(ps.ms, ps.split1, ps.split2);
    DSFResult const back = dsf(ps.ms, ps.split2, ps.split1);
    auto const so = so_residuals(ps.ms, d.polar.Lambda);
    double const scale = d.dsf * d.dsf;
    int const min_pq = std::min(ps.ms.sig.p, ps.ms.sig.q);
    int const expanding = count_expanding(d.polar.spectrum_L);

    CommandOutput out;
    out.results = Json{{"signature", report::encode(ps.ms.sig)},
                       {"dsf", d.dsf},
                       {"rapidity", d.rapidity},
                       {"map_norm_g2", d.map_norm},
                       {"dsf_reversed", back.dsf},
                       {"spectrum_L", report::encode(d.polar.spectrum_L)},
                       {"expanding_eigenvalues", expanding},
                       {"min_pq", min_pq},
                       {"V1", report::encode(ps.split1.basis_V)},
                       {"V2", report::encode(ps.split2.basis_V)},
                       {"polar", report::encode(d.polar)}};

    auto const& r = d.polar.residuals;
    out.checks = {
        {"Lambda_isometry_residual", so.isometry / scale, 1e-10},
        {"Lambda_det_residual", so.det, 1e-10},
        {"polar_factorization_residual", r.factorization, 1e-10},
        {"L_isometry_residual", r.L_isometry / scale, 1e-10},
        {"O_g2_unitary_residual", r.O_unitary / scale, 1e-10},
        {"O_stabilizes_V2_residual", r.O_stabilizes / scale, 1e-10},
        {"adjoint_identity_residual", r.adjoint_identity / scale, 1e-10},
        {"L_maps_V1_to_V2_residual", r.maps_V1_to_V2 / scale, 1e-10},
        {"spectrum_inversion_defect", r.spectrum_pairing, 1e-8},
        {"map_norm_vs_dsf", detail::relative(d.map_norm, d.dsf), 1e-10},
        {"order_symmetry", std::abs(d.dsf - back.dsf), 1e-10},
        {"expanding_minus_min_pq", double(expanding - min_pq), 0.0},
    };
    if (ps.lorentzian_vectors)
    {
        double const gv = inner(ps.ms, ps.v1, ps.v2)
                          / std::sqrt(inner(ps.ms, ps.v1, ps.v1)
                                      * inner(ps.ms, ps.v2, ps.v2));
        double const closed = dsf_lorentzian(std::max(1.0, gv));
        out.results["g_v1v2"] = gv;
        out.results["dsf_lorentzian"] = closed;
        out.checks.push_back(
            {"lorentzian_closed_form", std::abs(d.dsf - closed), 1e-10});
    }
    return out;
}

//---------------------------------------------------------------------------//
// liftnorm
//---------------------------------------------------------------------------//

inline CommandOutput cmd_liftnorm(Json const& cfg)
{
    detail::require_keys(cfg, detail::pair_keys(), "liftnorm config");
    auto const ps = detail::pair_setup(cfg);
    if (!ps.rep)
        fail_input("liftnorm needs an even-dimensional diagonal +-1 metric");
    KreinProductSpace const space = make_krein_space(*ps.rep);
    DSFResult const d = dsf(ps.ms, ps.split1, ps.split2);
    FundSym const fs1 = fundamental_symmetry(space, ps.split1);
    FundSym const fs2 = fundamental_symmetry(space, ps.split2);
    SpinLift const sl = lift(space.rep, d.polar);
    LiftNormReport const ln = lift_norm(space, fs2, sl);
    AdSpectrumReport const ad = ad_spectrum(sl, d.polar.spectrum_L);
    PairingReport const pairing
        = pseudo_unitary_spectrum_check(sl.tildeL, space.H());
    auto const biv = bivector_residuals(ps.ms.g, ps.split2, sl.bivector_coeffs);

    // L~ carries n1 to n2: L~ n1 L~^{-1} = +-n2.
    CMat const conj = sl.tildeL * fs1.n * sl.tildeL_inv;
    double const intertwine
        = std::min((conj - fs2.n).norm(), (conj + fs2.n).norm())
          / std::max(1.0, ln.lift_norm * ln.lift_norm);

    CommandOutput out;
    out.results = Json{{"signature", report::encode(ps.ms.sig)},
                       {"lift_norm_report", report::encode(ln)},
                       {"dsf", d.dsf},
                       {"spectrum_L", report::encode(d.polar.spectrum_L)},
                       {"bounds",
                        {{"lower_holds",
                          ln.lift_norm >= ln.lower_bound - 1e-8},
                         {"upper_holds",
                          ln.lift_norm <= ln.upper_bound + 1e-8},
                         {"lower_strict",
                          ln.lift_norm > ln.lower_bound * (1 + 1e-9)},
                         {"upper_strict",
                          ln.lift_norm < ln.upper_bound * (1 - 1e-9)}}},
                       {"ad_spectrum",
                        {{"distinct", ad.distinct},
                         {"radius", ad.radius},
                         {"numerical_checked", ad.numerical_checked}}},
                       {"lift_convention", sl.convention},
                       {"tildeL", report::encode(sl.tildeL)}};

    out.checks = {
        {"lower_bound_slack", ln.lower_bound - ln.lift_norm, 1e-8},
        {"upper_bound_slack", ln.lift_norm - ln.upper_bound, 1e-8},
        {"ad_radius_vs_lift_norm_sq",
         detail::relative(ln.ad_spectral_radius, ln.lift_norm * ln.lift_norm),
         1e-9},
        {"product_formula_vs_lift_norm",
         detail::relative(ln.product_formula_value, ln.lift_norm), 1e-9},
        {"ad_compatibility_residual", sl.ad_residual, 1e-9},
        {"normality_residual", ln.normality_residual, 1e-8},
        {"krein_pairing_defect", pairing.pairing_defect, 1e-8},
        {"ad_subset_vs_quotients", ad.quotient_defect, 1e-8},
        {"bivector_g_antisymmetry", biv.g_antisymmetry, 1e-9},
        {"bivector_g2_symmetry", biv.g2_symmetry, 1e-9},
        {"lift_intertwines_n1_n2", intertwine, 1e-9},
    };
    if (ad.numerical_checked)
        out.checks.push_back(
            {"ad_subset_vs_numerical", ad.enumeration_defect, 1e-8});
    if (ln.min_pq == 1)
        out.checks.push_back({"lorentzian_equality",
                              std::abs(ln.lift_norm - ln.lower_bound), 1e-9});
    return out;
}

//---------------------------------------------------------------------------//
// sweep
//---------------------------------------------------------------------------//

namespace detail
{
/// Vector field from {"constant": [...]} or {"samples": [{"x", "v"}, ...]}
/// (nearest-sample lookup).
inline VectorField vector_field_from(Json const& j, std::string const& name)
{
    require_keys(j, {"constant", "samples", "label"}, "'" + name + "'");
    std::string const label
        = j.contains("label") ? j["label"].get<std::string>() : name;
    if (j.contains("constant") == j.contains("samples"))
        fail_input("'" + name + "' needs exactly one of 'constant', "
                   "'samples'");
    if (j.contains("constant"))
    {
        RVec const v = report::decode_vector(j["constant"], name + ".constant");
        return {[v](RVec const&) { return v; }, label};
    }
    std::vector<std::pair<RVec, RVec>> table;
    for (auto const& s : j["samples"])
    {
        require_keys(s, {"x", "v"}, "'" + name + "' sample");
        table.emplace_back(report::decode_vector(s.at("x"), name + ".x"),
                           report::decode_vector(s.at("v"), name + ".v"));
    }
    if (table.empty())
        fail_input("'" + name + "' has no samples");
    return {[table](RVec const& x) {
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < table.size(); ++i)
                {
                    if (table[i].first.size() != x.size())
                        fail_input("vector field sample has wrong dimension");
                    double const d = (table[i].first - x).squaredNorm();
                    if (d < best_d)
                    {
                        best_d = d;
                        best = i;
                    }
                }
                return table[best].second;
            },
            label};
}

inline presets::SweepPreset preset_from(Json const& cfg)
{
    Json const params = cfg.contains("params") ? cfg["params"] : Json::object();
    std::string const name = cfg["preset"].get<std::string>();
    if (name == presets::kMinkowskiRestVsBoostfield)
    {
        require_keys(params, {"x0"}, "preset params");
        double lo = -5, hi = 5;
        int n = 201;
        range_from(params, "x0", lo, hi, n);
        auto p = presets::minkowski_rest_vs_boostfield(5.0, n);
        p.grid = presets::axis_grid(0, lo, hi, n);
        return p;
    }
    if (name == presets::kMinkowskiShearVsE0)
    {
        require_keys(params, {"x3"}, "preset params");
        double lo = -5, hi = 5;
        int n = 201;
        range_from(params, "x3", lo, hi, n);
        return presets::minkowski_shear_vs_e0(lo, hi, n);
    }
    if (name == presets::kCovariantlyConstantPair)
    {
        require_keys(params, {"xi", "extent", "samples"}, "preset params");
        return presets::covariantly_constant_pair(
            get_number(params, "xi", 0.4), get_number(params, "extent", 5.0),
            get_int(params, "samples", 21));
    }
    if (name == presets::kSchwarzschildRadialInOut)
    {
        require_keys(params, {"rmin", "rmax", "samples", "e_in", "e_out"},
                     "preset params");
        return presets::schwarzschild_radial_in_out(
            get_number(params, "rmin", 1.05), get_number(params, "rmax", 10.0),
            get_int(params, "samples", 200), get_number(params, "e_in", 1.0),
            get_number(params, "e_out", 1.0));
    }
    if (name == presets::kCounterexampleBump || name == presets::kDivergentField)
        fail_input("preset '" + name + "' runs under the counterexample "
                   "command");
    fail_input("unknown preset '" + name + "'");
}

inline presets::SweepPreset custom_from(Json const& cfg)
{
    for (char const* key : {"metric_diag", "v1", "v2", "grid"})
    {
        if (!cfg.contains(key))
            fail_input(std::string("custom sweep needs '") + key + "'");
    }
    RVec const diag = report::decode_vector(cfg["metric_diag"], "metric_diag");
    presets::SweepPreset p;
    p.name = "custom";
    p.kind = presets::SweepKind::vectors;
    p.metric = constant_metric_field(diag.asDiagonal().toDenseMatrix());
    p.v1 = vector_field_from(cfg["v1"], "v1");
    p.v2 = vector_field_from(cfg["v2"], "v2");
    p.grid = get_grid(cfg["grid"]);
    if (cfg.contains("growth_coordinate"))
    {
        Json const& gc = cfg["growth_coordinate"];
        require_keys(gc, {"axis", "abs"}, "'growth_coordinate'");
        int const axis = get_int(gc, "axis", 0);
        if (axis < 0 || axis >= diag.size())
            fail_input("growth_coordinate axis out of range");
        bool const use_abs = get_bool(gc, "abs", false);
        p.growth = {(use_abs ? "|x" : "x") + std::to_string(axis)
                        + (use_abs ? "|" : ""),
                    [axis, use_abs](RVec const& x) {
                        return use_abs ? std::abs(x(axis)) : x(axis);
                    }};
    }
    return p;
}

inline std::string sweep_csv(SweepReport const& rep)
{
    std::ostringstream os;
    os.precision(17);
    int const n = rep.samples.empty()
                      ? 0
                      : static_cast<int>(rep.samples.front().point.size());
    for (int a = 0; a < n; ++a)
        os << "x" << a << ",";
    os << "dsf,rapidity,g_v1v2\n";
    for (auto const& s : rep.samples)
    {
        for (int a = 0; a < n; ++a)
            os << s.point(a) << ",";
        os << s.dsf << "," << s.rapidity << ",";
        if (!std::isnan(s.g_v1v2))
            os << s.g_v1v2;
        os << "\n";
    }
    return os.str();
}
}  // namespace detail

inline CommandOutput cmd_sweep(Json const& cfg)
{
    detail::require_keys(cfg,
                         {"preset", "params", "grid", "metric_diag", "v1",
                          "v2", "growth_coordinate", "threads",
                          "include_samples", "check_refinement",
                          "tolerances"},
                         "sweep config");
    presets::SweepPreset preset;
    if (cfg.contains("preset"))
    {
        if (!cfg["preset"].is_string())
            fail_input("'preset' must be a string");
        for (char const* key : {"metric_diag", "v1", "v2", "growth_coordinate"})
        {
            if (cfg.contains(key))
                fail_input(std::string("'") + key
                           + "' is only valid for custom sweeps");
        }
        preset = detail::preset_from(cfg);
        if (cfg.contains("grid"))
            preset.grid = detail::get_grid(cfg["grid"]);
    }
    else
    {
        if (cfg.contains("params"))
            fail_input("'params' needs a 'preset'");
        preset = detail::custom_from(cfg);
    }
    int const threads = detail::get_int(cfg, "threads", 0);
    if (threads < 0)
        fail_input("'threads' must be >= 0");

    SweepOptions opts;
    opts.threads = static_cast<unsigned>(threads);
    if (preset.growth.value)
        opts.growth_coordinate = preset.growth;
    auto run = [&](GridSpec const& grid) {
        if (preset.kind == presets::SweepKind::splittings)
        {
            return dsf_sweep(preset.metric,
                             splitting_field_of(preset.metric, preset.v1),
                             splitting_field_of(preset.metric, preset.v2),
                             grid, opts);
        }
        return doppler_class_check(preset.metric, preset.v1, preset.v2, grid,
                                   opts);
    };
    SweepReport const rep = run(preset.grid);

    CommandOutput out;
    out.results = Json{{"preset", preset.name},
                       {"field_1", preset.v1.label},
                       {"field_2", preset.v2.label},
                       {"grid", report::encode(preset.grid)},
                       {"thresholds",
                        {{"slope", opts.slope_threshold},
                         {"residual_cap", opts.residual_cap}}},
                       {"report", report::encode(
                                      rep, detail::get_bool(
                                               cfg, "include_samples", false))}};
    if (rep.max_pointwise_discrepancy)
    {
        out.checks.push_back({"pointwise_splitting_vs_closed_form",
                              *rep.max_pointwise_discrepancy, 1e-9});
    }
    if (detail::get_bool(cfg, "check_refinement", true))
    {
        SweepReport const fine = run(preset.grid.refined());
        bool const flipped = rep.verdict == Verdict::growth_detected
                             && fine.verdict == Verdict::bounded_on_domain;
        out.results["refined"]
            = Json{{"grid", report::encode(preset.grid.refined())},
                   {"verdict", to_string(fine.verdict)},
                   {"sup_dsf", fine.sup_dsf},
                   {"growth_fit", report::encode(fine.growth_fit)}};
        out.checks.push_back(
            {"verdict_flips_under_refinement", flipped ? 1.0 : 0.0, 0.0});
    }
    out.csv = detail::sweep_csv(rep);
    return out;
}

//---------------------------------------------------------------------------//
// counterexample
//---------------------------------------------------------------------------//

inline CommandOutput cmd_counterexample(Json const& cfg)
{
    detail::require_keys(cfg,
                         {"y0", "width", "cells", "width_study", "x_max",
                          "step", "fit_window", "tolerances"},
                         "counterexample config");
    auto const y0s = detail::get_numbers(cfg, "y0", {0.0, 1.0, 2.0, 3.0});
    double const width = detail::get_number(cfg, "width", 0.01);
    int const cells = detail::get_int(cfg, "cells", 2001);
    auto const study
        = detail::get_numbers(cfg, "width_study", {0.5, 0.1, 0.02});
    double const x_max = detail::get_number(cfg, "x_max", 20.0);
    double const step = detail::get_number(cfg, "step", 0.5);
    auto const window = detail::get_numbers(cfg, "fit_window", {5.0, 20.0});
    if (window.size() != 2)
        fail_input("'fit_window' must be [lo, hi]");

    CommandOutput out;
    Json bumps = Json::array();
    double worst_eta = 0.0, worst_n = 0.0;
    double non_monotone = 0.0;
    for (double y0 : y0s)
    {
        auto const cn = counterexample_norms(y0, width,
                                             bump_grid(y0, width, cells));
        double const target = std::cosh(y0);
        double const rel = std::abs(cn.n_norm_sq / target - 1.0);
        worst_eta = std::max(worst_eta, std::abs(cn.eta_norm_sq - 1.0));
        worst_n = std::max(worst_n, rel);

        Json conv = Json::array();
        double prev_gap = std::numeric_limits<double>::infinity();
        for (double w : study)
        {
            auto const c = counterexample_norms(y0, w, bump_grid(y0, w, cells));
            double const gap = std::abs(c.n_norm_sq - target);
            if (gap > prev_gap)
                non_monotone += 1.0;
            prev_gap = gap;
            conv.push_back(Json{{"width", w},
                                {"n_norm_sq", c.n_norm_sq},
                                {"gap_to_cosh_y0", gap}});
        }
        bumps.push_back(Json{{"y0", y0},
                             {"width", width},
                             {"eta_norm_sq", cn.eta_norm_sq},
                             {"n_norm_sq", cn.n_norm_sq},
                             {"cosh_y0", target},
                             {"n_relative_error", rel},
                             {"outside_mass", cn.outside_mass},
                             {"width_study", conv}});
    }

    auto const div = divergent_field_demo(x_max, step, window[0], window[1]);
    Json rows = Json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "X,eta_partial,n_partial\n";
    for (auto const& r : div.rows)
    {
        rows.push_back(Json::array({r.X, r.eta_partial, r.n_partial}));
        csv << r.X << "," << r.eta_partial << "," << r.n_partial << "\n";
    }
    out.results = Json{{"bump", bumps},
                       {"divergent_field",
                        {{"columns", Json::array({"X", "eta_partial",
                                                  "n_partial"})},
                         {"rows", rows},
                         {"eta_fit", report::encode(div.eta_fit)},
                         {"n_fit", report::encode(div.n_fit)},
                         {"eta_converges", div.eta_converges},
                         {"n_converges", div.n_converges}}}};
    out.checks = {
        {"eta_norm_sq_minus_one", worst_eta, 1e-6},
        {"n_norm_sq_relative_to_cosh_y0", worst_n, 0.01},
        {"width_study_non_monotone_steps", non_monotone, 0.0},
        {"divergent_slope_minus_one", std::abs(div.n_fit.slope - 1.0), 1e-3},
        {"convergent_slope", std::abs(div.eta_fit.slope), 0.05},
    };
    out.csv = csv.str();
    return out;
}

//---------------------------------------------------------------------------//
// props: seeded randomized property suite
//---------------------------------------------------------------------------//

struct PropertyStats
{
    int samples = 0;
    double max_dsf = 1.0;
    double symmetry = 0.0;           //!< |dsf(V1,V2) - dsf(V2,V1)|
    double lemma1_map_norm = 0.0;    //!< | ||O'Lambda||_{g2} - dsf |
    double lemma1_polar = 0.0;       //!< | r(L') - dsf |
    double lower_slack = -1e300;     //!< max of lower - lift
    double upper_slack = -1e300;     //!< max of lift - upper
    double lorentz_equality = 0.0;   //!< | lift - dsf^{1/2} | when min(p,q)=1
    double eq21 = 0.0;               //!< relative r(Ad) vs lift^2
    double product_formula = 0.0;    //!< relative
    double lemma2 = 0.0;             //!< relative ||O~ L~|| vs ||L~||
    double expanding_excess = -1e300;
    double fundsym = 0.0;            //!< worst FundSym residual (n^2, H n)
};

/// Random splitting pairs in one signature; all draws from one engine.
inline PropertyStats run_properties(Signature const& sig, int samples,
                                    sampling::Engine& rng)
{
    validate(sig);
    KreinProductSpace const space = make_krein_space(sig);
    MetricSpace const ms = make_metric_space(space.rep);
    int const min_pq = std::min(sig.p, sig.q);

    PropertyStats st;
    st.samples = samples;
    for (int k = 0; k < samples; ++k)
    {
        Splitting const s1 = sampling::random_splitting(rng, ms);
        Splitting const s2 = sampling::random_splitting(rng, ms);
        DSFResult const d12 = dsf(ms, s1, s2);
        DSFResult const d21 = dsf(ms, s2, s1);
        st.max_dsf = std::max(st.max_dsf, d12.dsf);
        st.symmetry = std::max(st.symmetry, std::abs(d12.dsf - d21.dsf));
        st.expanding_excess
            = std::max(st.expanding_excess,
                       double(count_expanding(d12.polar.spectrum_L) - min_pq));

        RMat const o = sampling::random_stabilizer(rng, s2);
        RMat const lam2 = o * d12.polar.Lambda;
        st.lemma1_map_norm = std::max(
            st.lemma1_map_norm, std::abs(operator_norm_g(s2, lam2) - d12.dsf));
        auto const pp2 = polar_decompose(ms, s2, lam2, &s1);
        st.lemma1_polar = std::max(st.lemma1_polar,
                                   std::abs(pp2.spectrum_L(0) - d12.dsf));
        // Any other map carrying V1 to V2 differs by a stabilizer of V1.
        RMat const o1 = sampling::random_stabilizer(rng, s1);
        st.lemma1_map_norm = std::max(
            st.lemma1_map_norm,
            std::abs(operator_norm_g(s2, d12.polar.Lambda * o1) - d12.dsf));

        FundSym const fs2 = fundamental_symmetry(space, s2);
        auto const fr = fundsym_residuals(space, fs2.n);
        st.fundsym = std::max({st.fundsym, fr.involution, fr.krein_selfadj});
        SpinLift const sl = lift(space.rep, d12.polar);
        LiftNormReport const ln = lift_norm(space, fs2, sl);
        st.lower_slack = std::max(st.lower_slack, ln.lower_bound - ln.lift_norm);
        st.upper_slack = std::max(st.upper_slack, ln.lift_norm - ln.upper_bound);
        if (min_pq == 1)
            st.lorentz_equality
                = std::max(st.lorentz_equality,
                           std::abs(ln.lift_norm - ln.lower_bound));
        st.eq21 = std::max(st.eq21,
                           detail::relative(ln.ad_spectral_radius,
                                            ln.lift_norm * ln.lift_norm));
        st.product_formula
            = std::max(st.product_formula,
                       detail::relative(ln.product_formula_value, ln.lift_norm));

        RMat const c = sampling::random_stabilizer_generator(rng, s2);
        SpinElement const stab = spin_exp(space.rep, c);
        double const moved
            = operator_norm(space, fs2, CMat(stab.value * sl.tildeL));
        st.lemma2 = std::max(st.lemma2, detail::relative(moved, ln.lift_norm));
    }
    return st;
}

inline CommandOutput cmd_props(Json const& cfg, std::uint64_t seed)
{
    detail::require_keys(cfg, {"p", "q", "samples", "tolerances"},
                         "props config");
    Signature const sig = detail::get_signature(cfg);
    int const samples = detail::get_int(cfg, "samples", 200);
    if (samples < 1)
        fail_input("'samples' must be positive");
    sampling::Engine rng(seed);
    PropertyStats const st = run_properties(sig, samples, rng);

    CommandOutput out;
    out.results = Json{{"signature", report::encode(sig)},
                       {"samples", st.samples},
                       {"seed", seed},
                       {"max_dsf", st.max_dsf},
                       {"max_symmetry_defect", st.symmetry},
                       {"max_lemma1_defect", st.lemma1_map_norm},
                       {"max_prop2_lower_slack", st.lower_slack},
                       {"max_prop2_upper_slack", st.upper_slack},
                       {"max_eq21_defect", st.eq21},
                       {"max_product_formula_defect", st.product_formula},
                       {"max_lemma2_defect", st.lemma2}};
    out.checks = {
        {"dsf_symmetry", st.symmetry, 1e-10},
        {"lemma1_map_norm", st.lemma1_map_norm, 1e-10},
        {"lemma1_polar", st.lemma1_polar, 1e-10},
        {"prop2_lower", st.lower_slack, 1e-8},
        {"prop2_upper", st.upper_slack, 1e-8},
        {"eq21_relative", st.eq21, 1e-9},
        {"product_formula_relative", st.product_formula, 1e-9},
        {"lemma2_relative", st.lemma2, 1e-9},
        {"expanding_excess", st.expanding_excess, 0.0},
        {"fundamental_symmetry_residual", st.fundsym, 1e-10},
    };
    if (std::min(sig.p, sig.q) == 1)
        out.checks.push_back(
            {"lorentzian_equality", st.lorentz_equality, 1e-9});
    return out;
}

//---------------------------------------------------------------------------//
// DISPATCH
//---------------------------------------------------------------------------//

namespace detail
{
inline void apply_tolerances(Json const& cfg, std::vector<Check>& checks)
{
    if (!cfg.contains("tolerances"))
        return;
    Json const& t = cfg["tolerances"];
    if (!t.is_object())
        fail_input("'tolerances' must be an object of check name -> value");
    for (auto const& item : t.items())
    {
        auto it = std::find_if(checks.begin(), checks.end(),
                               [&](Check const& c) {
                                   return c.name == item.key();
                               });
        if (it == checks.end())
            fail_input("'tolerances' names unknown check '" + item.key()
                       + "'");
        if (!item.value().is_number())
            fail_input("tolerance for '" + item.key() + "' must be a number");
        it->tolerance = item.value().get<double>();
    }
}

inline CommandOutput dispatch(RunConfig const& rc)
{
    if (rc.command == "rep")
        return cmd_rep(rc.config);
    if (rc.command == "dsf")
        return cmd_dsf(rc.config);
    if (rc.command == "liftnorm")
        return cmd_liftnorm(rc.config);
    if (rc.command == "sweep")
        return cmd_sweep(rc.config);
    if (rc.command == "counterexample")
        return cmd_counterexample(rc.config);
    if (rc.command == "props")
        return cmd_props(rc.config, rc.seed);
    fail_input("unknown command '" + rc.command + "'");
}
}  // namespace detail

/// Runs one command and wraps it into a versioned report.
inline CommandResult run_command(RunConfig const& rc)
{
    auto const start = std::chrono::steady_clock::now();
    CommandResult result;
    Json rep{{"schema_version", report::kSchemaVersion},
             {"tool", "kreinctl"},
             {"command",
              {{"name", rc.command}, {"config", rc.config}, {"seed", rc.seed}}}};
    try
    {
        CommandOutput out = detail::dispatch(rc);
        detail::apply_tolerances(rc.config, out.checks);
        bool all_pass = true;
        Json checks = Json::array();
        for (auto const& c : out.checks)
        {
            checks.push_back(report::encode(c));
            all_pass = all_pass && c.pass();
        }
        rep["results"] = std::move(out.results);
        rep["checks"] = std::move(checks);
        rep["status"] = all_pass ? "pass" : "check_failed";
        result.exit_code = all_pass ? kExitOk : kExitCheckFailed;
        result.csv = std::move(out.csv);
    }
    catch (Error const& e)
    {
        bool const input = e.kind() == ErrorKind::invalid_input;
        rep["error"] = {{"kind", input ? "invalid_input" : "consistency"},
                        {"message", e.what()}};
        rep["status"] = input ? "invalid_input" : "internal_error";
        result.exit_code = input ? kExitInvalidInput : kExitInternal;
    }
    catch (nlohmann::json::exception const& e)
    {
        rep["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
        rep["status"] = "invalid_input";
        result.exit_code = kExitInvalidInput;
    }
    if (rc.timing)
    {
        std::chrono::duration<double> const dt
            = std::chrono::steady_clock::now() - start;
        rep["wall_time_s"] = dt.count();
    }
    result.report = std::move(rep);
    return result;
}

}  // namespace krein::cli
