// SPDX-License-Identifier: Apache-2.0
//
// JSON encodings used in kreinctl reports. Matrices are row-major; complex
// entries are [re, im] pairs.
#pragma once

#include "krein/clifford_rep.hpp"
#include "krein/doppler.hpp"
#include "krein/field_analysis.hpp"
#include "krein/spin_lift.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace krein::report
{

using Json = nlohmann::ordered_json;

inline constexpr char const* kSchemaVersion = "1.0.0";

inline Json encode(RMat const& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json encode(CMat const& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json encode(RVec const& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

inline Json encode(std::vector<double> const& v)
{
    return Json(v);
}

inline RMat decode_matrix(Json const& j, std::string const& what)
{
    if (!j.is_array() || j.empty())
        fail_input(what + " must be a non-empty array of rows");
    Eigen::Index const rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    RMat m;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        Json const& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array())
            fail_input(what + " rows must be arrays");
        if (cols < 0)
        {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        }
        if (static_cast<Eigen::Index>(row.size()) != cols)
            fail_input(what + " rows have unequal lengths");
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            Json const& x = row[static_cast<std::size_t>(c)];
            if (!x.is_number())
                fail_input(what + " entries must be numbers");
            m(i, c) = x.get<double>();
        }
    }
    return m;
}

inline RVec decode_vector(Json const& j, std::string const& what)
{
    if (!j.is_array() || j.empty())
        fail_input(what + " must be a non-empty array of numbers");
    RVec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
            fail_input(what + " entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline Json encode(Signature const& sig)
{
    return Json{{"p", sig.p}, {"q", sig.q}};
}

inline Json encode(PolarParts const& pp)
{
    auto const& r = pp.residuals;
    return Json{{"spectrum_L", encode(pp.spectrum_L)},
                {"Lambda", encode(pp.Lambda)},
                {"O", encode(pp.O)},
                {"L", encode(pp.L)},
                {"residuals",
                 {{"factorization", r.factorization},
                  {"L_isometry", r.L_isometry},
                  {"O_unitary_g2", r.O_unitary},
                  {"O_stabilizes_V2", r.O_stabilizes},
                  {"adjoint_identity", r.adjoint_identity},
                  {"maps_V1_to_V2", r.maps_V1_to_V2},
                  {"spectrum_pairing", r.spectrum_pairing}}}};
}

inline Json encode(LiftNormReport const& r)
{
    return Json{{"lift_norm", r.lift_norm},
                {"base_norm", r.base_norm},
                {"ad_spectral_radius", r.ad_spectral_radius},
                {"product_formula_value", r.product_formula_value},
                {"lower_bound", r.lower_bound},
                {"upper_bound", r.upper_bound},
                {"min_pq", r.min_pq},
                {"normality_residual", r.normality_residual}};
}

inline Json encode(LinearFit const& f)
{
    return Json{{"coordinate", f.coordinate},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"residual", f.residual},
                {"correlation", f.correlation}};
}

inline Json encode(GridSpec const& g)
{
    Json bounds = Json::array();
    for (auto const& [lo, hi] : g.bounds)
        bounds.push_back(Json::array({lo, hi}));
    return Json{{"bounds", bounds}, {"resolution", g.resolution}};
}

inline Json encode(SweepReport const& r, bool include_samples)
{
    Json out{{"verdict", to_string(r.verdict)},
             {"sup_dsf", r.sup_dsf},
             {"argsup", encode(r.argsup)},
             {"sample_count", r.samples.size()}};
    if (r.sup_g_v1v2)
        out["sup_g_v1v2"] = *r.sup_g_v1v2;
    if (r.max_pointwise_discrepancy)
        out["max_pointwise_discrepancy"] = *r.max_pointwise_discrepancy;
    out["growth_fit"] = encode(r.growth_fit);
    Json axes = Json::array();
    for (auto const& f : r.axis_fits)
        axes.push_back(encode(f));
    out["axis_fits"] = axes;
    if (include_samples)
    {
        Json samples = Json::array();
        for (auto const& s : r.samples)
        {
            Json row{{"point", encode(s.point)},
                     {"dsf", s.dsf},
                     {"rapidity", s.rapidity}};
            if (!std::isnan(s.g_v1v2))
                row["g_v1v2"] = s.g_v1v2;
            samples.push_back(std::move(row));
        }
        out["samples"] = samples;
    }
    return out;
}

/// One numeric check: value <= tolerance, or value >= tolerance when
/// at_least is set. NaN never passes.
struct Check
{
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool at_least = false;

    bool pass() const
    {
        return at_least ? value >= tolerance : value <= tolerance;
    }
};

inline Json encode(Check const& c)
{
    return Json{{"name", c.name},
                {"value", c.value},
                {"comparison", c.at_least ? ">=" : "<="},
                {"tolerance", c.tolerance},
                {"pass", c.pass()}};
}

}  // namespace krein::report
