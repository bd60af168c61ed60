// SPDX-License-Identifier: Apache-2.0
//
// kreinctl: command-line front end for the krein library.
//
//   kreinctl rep --p 1 --q 3
//   kreinctl dsf --config pair.json --out report.json
//   kreinctl sweep --preset minkowski-shear-vs-e0 --x3=-5:5:201 --csv s.csv
//   kreinctl counterexample
//   kreinctl props --p 2 --q 2 --samples 500 --seed 7
//
// Exit codes: 0 ok, 1 a numeric check failed, 2 invalid input, 3 internal
// consistency failure.

#include "krein/cli/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

using krein::cli::Json;

struct Flags
{
    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::optional<std::uint64_t> seed;
    bool timing = false;

    std::optional<int> p, q, samples, cells, threads;
    std::vector<int> metric_signs;
    std::vector<double> boost, y0;
    std::optional<double> xi, rmin, rmax, width, x_max;
    std::string preset, x0, x3;
    bool include_samples = false;
    bool no_refinement = false;
};

Json load_config(std::string const& path)
{
    if (path.empty())
        return Json::object();
    std::ifstream in(path);
    if (!in)
        krein::fail_input("cannot open config file '" + path + "'");
    try
    {
        Json j = Json::parse(in);
        if (!j.is_object())
            krein::fail_input("config file must hold a JSON object");
        return j;
    }
    catch (nlohmann::json::parse_error const& e)
    {
        krein::fail_input("config file '" + path + "': " + e.what());
    }
}

/// Flags override keys read from the config file.
Json merge_flags(std::string const& cmd, Flags const& f, Json cfg)
{
    if (f.p)
        cfg["p"] = *f.p;
    if (f.q)
        cfg["q"] = *f.q;
    if (!f.metric_signs.empty())
        cfg["metric_signs"] = f.metric_signs;
    if (!f.boost.empty())
        cfg["boost_rapidities"] = f.boost;
    if (f.samples)
        cfg["samples"] = *f.samples;

    if (cmd == "sweep")
    {
        cfg.erase("samples");
        if (!f.preset.empty())
            cfg["preset"] = f.preset;
        Json params = cfg.contains("params") ? cfg["params"] : Json::object();
        if (!f.x0.empty())
            params["x0"] = krein::cli::detail::parse_range(f.x0);
        if (!f.x3.empty())
            params["x3"] = krein::cli::detail::parse_range(f.x3);
        if (f.xi)
            params["xi"] = *f.xi;
        if (f.rmin)
            params["rmin"] = *f.rmin;
        if (f.rmax)
            params["rmax"] = *f.rmax;
        if (f.samples)
            params["samples"] = *f.samples;
        if (!params.empty())
            cfg["params"] = params;
        if (f.threads)
            cfg["threads"] = *f.threads;
        if (f.include_samples)
            cfg["include_samples"] = true;
        if (f.no_refinement)
            cfg["check_refinement"] = false;
    }
    if (cmd == "counterexample")
    {
        if (!f.y0.empty())
            cfg["y0"] = f.y0;
        if (f.width)
            cfg["width"] = *f.width;
        if (f.cells)
            cfg["cells"] = *f.cells;
        if (f.x_max)
            cfg["x_max"] = *f.x_max;
    }
    return cfg;
}

bool write_text(std::string const& path, std::string const& text)
{
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Krein-space spinor tools: Clifford representations, "
                 "Doppler shift factors, spin lifts and field sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--config", f.config_path, "JSON config file");
    app.add_option("--out", f.out_path, "write the JSON report here");
    app.add_option("--csv", f.csv_path, "write plot data here (sweep, "
                                        "counterexample)");
    app.add_option("--seed", f.seed, "random seed for property suites");
    app.add_flag("--timing", f.timing, "add wall_time_s to the report");

    auto* rep = app.add_subcommand("rep", "build and check a representation");
    auto* dsf = app.add_subcommand("dsf", "Doppler shift factor of two "
                                          "splittings");
    auto* lift = app.add_subcommand("liftnorm", "spin lift norm and bounds");
    auto* sweep = app.add_subcommand("sweep", "field sweep on a preset or "
                                              "custom fields");
    auto* cex = app.add_subcommand("counterexample",
                                   "bump and divergent-field norms");
    auto* props = app.add_subcommand("props",
                                     "seeded randomized property suite");

    for (auto* sub : {rep, dsf, lift, props})
    {
        sub->add_option("--p", f.p, "positive signature count");
        sub->add_option("--q", f.q, "negative signature count");
    }
    rep->add_option("--metric-signs", f.metric_signs,
                    "explicit diagonal metric, e.g. 1 -1 -1 -1");
    for (auto* sub : {dsf, lift})
        sub->add_option("--boost", f.boost,
                        "q-boost rapidities applied to V1");
    props->add_option("--samples", f.samples, "random pairs to draw");

    sweep->add_option("--preset", f.preset, "preset name")
        ->check(CLI::IsMember(krein::presets::sweep_preset_names()));
    sweep->add_option("--x0", f.x0, "x0 range lo:hi:N");
    sweep->add_option("--x3", f.x3, "x3 range lo:hi:N");
    sweep->add_option("--xi", f.xi, "relative rapidity");
    sweep->add_option("--rmin", f.rmin, "inner radius (units of r_s)");
    sweep->add_option("--rmax", f.rmax, "outer radius (units of r_s)");
    sweep->add_option("--samples", f.samples, "samples along the sweep axis");
    sweep->add_option("--threads", f.threads, "worker threads (0 = auto)");
    sweep->add_flag("--include-samples", f.include_samples,
                    "list every sample in the report");
    sweep->add_flag("--no-refinement", f.no_refinement,
                    "skip the doubled-resolution rerun");

    cex->add_option("--y0", f.y0, "bump centres");
    cex->add_option("--width", f.width, "bump standard deviation");
    cex->add_option("--cells", f.cells, "quadrature cells");
    cex->add_option("--x-max", f.x_max, "divergent-field range");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return krein::cli::kExitInvalidInput;
    }

    krein::cli::RunConfig rc;
    rc.command = app.get_subcommands().front()->get_name();
    rc.timing = f.timing;
    if (f.seed)
        rc.seed = *f.seed;

    krein::cli::CommandResult result;
    try
    {
        rc.config = merge_flags(rc.command, f, load_config(f.config_path));
        result = krein::cli::run_command(rc);
    }
    catch (krein::Error const& e)
    {
        std::cerr << "kreinctl: " << e.what() << "\n";
        return krein::cli::kExitInvalidInput;
    }

    std::string const text = result.report.dump(2) + "\n";
    if (f.out_path.empty())
    {
        std::cout << text;
    }
    else if (!write_text(f.out_path, text))
    {
        std::cerr << "kreinctl: cannot write '" << f.out_path << "'\n";
        return krein::cli::kExitInvalidInput;
    }
    if (!f.csv_path.empty())
    {
        if (result.csv.empty())
        {
            std::cerr << "kreinctl: command '" << rc.command
                      << "' produces no CSV\n";
        }
        else if (!write_text(f.csv_path, result.csv))
        {
            std::cerr << "kreinctl: cannot write '" << f.csv_path << "'\n";
            return krein::cli::kExitInvalidInput;
        }
    }
    if (result.exit_code != krein::cli::kExitOk)
    {
        std::cerr << "kreinctl: status "
                  << result.report["status"].get<std::string>();
        if (result.report.contains("error"))
            std::cerr << ": "
                      << result.report["error"]["message"].get<std::string>();
        std::cerr << "\n";
    }
    return result.exit_code;
}
