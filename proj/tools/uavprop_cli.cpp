// SPDX-License-Identifier: Apache-2.0
// uavprop command-line front end.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "uavprop/canonical.hpp"
#include "uavprop/channel.hpp"
#include "uavprop/dataset.hpp"
#include "uavprop/error.hpp"
#include "uavprop/orchestrator.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int parallel = 1;
    bool resume = false;
    bool quiet = false;
};

struct ScenarioArgs {
    std::string out;
    std::uint64_t seed = 42;
};

struct ExportArgs {
    std::string dataset;
    std::string out;
};

struct PlotArgs {
    std::string dataset;
    int uav = 0;
    std::int64_t episode = 1;
    std::string metric = "power";
    std::string out;
};

struct MimoArgs {
    std::string dataset;
    std::int64_t receiver = 1;
    std::string tx_array;
    std::string rx_array;
    int nt = 2;
    int nr = 2;
    std::string out;
};

int simulate(const SimulateArgs& args)
{
    uavprop::RunConfig cfg = uavprop::parse_config(args.config);
    if (!args.out.empty()) {
        cfg.output_dir = args.out;
    }
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    uavprop::RunOptions opts;
    opts.parallel = args.parallel;
    opts.resume = args.resume;
    if (!args.quiet) {
        opts.log = [](const std::string& line) { std::cerr << line << '\n'; };
    }
    const auto result = uavprop::run_simulation(cfg, opts);
    std::cout << uavprop::canonical_dump(result.manifest.json.at("counts")) << '\n'
              << "dataset_hash " << result.manifest.dataset_hash << '\n';
    return 0;
}

int generate(const ScenarioArgs& args)
{
    uavprop::ScenarioParams params;
    params.seed = args.seed;
    uavprop::write_scenario(uavprop::generate_scenario(params), args.out);
    std::cout << "wrote scene.json, routes.json, config.json to " << args.out << '\n';
    return 0;
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        uavprop::write_text_file(path, text);
    }
}

int export_sql(const ExportArgs& args)
{
    write_output(args.out, uavprop::export_sql(uavprop::read_dataset(args.dataset)));
    return 0;
}

int plot(const PlotArgs& args)
{
    const auto metric = args.metric == "delay" ? uavprop::PlotMetric::Delay : uavprop::PlotMetric::Power;
    write_output(args.out,
                 uavprop::emit_plot_data(uavprop::read_dataset(args.dataset), args.uav, args.episode, metric));
    return 0;
}

uavprop::ArrayDescriptor load_array(const std::string& path, int count)
{
    if (path.empty()) {
        return uavprop::ArrayDescriptor::uniform_linear(count, 0.5, {0.0, 1.0, 0.0});
    }
    return uavprop::ArrayDescriptor::from_json(uavprop::parse_json(uavprop::read_text_file(path), path));
}

uavprop::Vec3 direction(double az_deg, double el_deg)
{
    const double az = az_deg * uavprop::kPi / 180.0;
    const double el = el_deg * uavprop::kPi / 180.0;
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

int mimo(const MimoArgs& args)
{
    const auto ds = uavprop::read_dataset(args.dataset);
    uavprop::RayFilter filter;
    filter.receiver_id = args.receiver;
    std::vector<uavprop::MimoPath> paths;
    for (const auto& ray : uavprop::query_rays(ds, filter)) {
        paths.push_back({ray.amplitude, direction(ray.aod_az, ray.aod_el), direction(ray.aoa_az, ray.aoa_el)});
    }
    if (paths.empty()) {
        throw uavprop::Error("receiver " + std::to_string(args.receiver) + " has no rays");
    }
    const double f = ds.run_config.value("frequency_hz", 60e9);
    const auto h = uavprop::synthesize_mimo(paths, load_array(args.tx_array, args.nt),
                                            load_array(args.rx_array, args.nr), f);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < h.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < h.matrix.cols(); ++c) {
            row.push_back({h.matrix(r, c).real(), h.matrix(r, c).imag()});
        }
        rows.push_back(row);
    }
    const nlohmann::json doc = {{"receiver_id", args.receiver},
                                {"frequency_hz", f},
                                {"paths", paths.size()},
                                {"tx_array", h.tx_array.to_json()},
                                {"rx_array", h.rx_array.to_json()},
                                {"matrix", rows}};
    write_output(args.out, uavprop::canonical_dump(doc, 1) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic 60 GHz UAV ray-tracing dataset generator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the full pipeline and write a dataset");
    simulate_cmd->add_option("--config", sim.config, "Run configuration JSON")->required();
    simulate_cmd->add_option("--out", sim.out, "Output dataset directory (overrides output_dir)");
    simulate_cmd->add_option("--seed", sim.seed, "Override the configured seed");
    simulate_cmd->add_option("--parallel", sim.parallel, "Worker threads")->check(CLI::PositiveNumber);
    simulate_cmd->add_flag("--resume", sim.resume, "Reuse per-scene checkpoints from an interrupted run");
    simulate_cmd->add_flag("--quiet", sim.quiet, "No per-scene progress on stderr");

    ScenarioArgs scen;
    auto* scenario_cmd = app.add_subcommand("generate-scenario", "Write the canonical scene, routes and config");
    scenario_cmd->add_option("--out", scen.out, "Output directory")->required();
    scenario_cmd->add_option("--seed", scen.seed, "Scenario seed");

    ExportArgs exp;
    auto* export_cmd = app.add_subcommand("export-sql", "Dump a dataset as SQL DDL plus INSERTs");
    export_cmd->add_option("--dataset", exp.dataset, "Dataset directory")->required();
    export_cmd->add_option("--out", exp.out, "SQL file ('-' for stdout)");

    PlotArgs plt;
    auto* plot_cmd = app.add_subcommand("plot-data", "Per-scene CSV series for one UAV");
    plot_cmd->add_option("--dataset", plt.dataset, "Dataset directory")->required();
    plot_cmd->add_option("--uav", plt.uav, "UAV id")->required();
    plot_cmd->add_option("--episode", plt.episode, "Episode id")->required();
    plot_cmd->add_option("--metric", plt.metric, "power or delay")->check(CLI::IsMember({"power", "delay"}));
    plot_cmd->add_option("--out", plt.out, "CSV file ('-' for stdout)");

    MimoArgs mim;
    auto* mimo_cmd = app.add_subcommand("mimo", "Narrowband MIMO matrix from one receiver's rays");
    mimo_cmd->add_option("--dataset", mim.dataset, "Dataset directory")->required();
    mimo_cmd->add_option("--receiver", mim.receiver, "Receiver id")->required();
    mimo_cmd->add_option("--tx-array", mim.tx_array, "Tx array descriptor JSON (default: ULA along y)");
    mimo_cmd->add_option("--rx-array", mim.rx_array, "Rx array descriptor JSON (default: ULA along y)");
    mimo_cmd->add_option("--nt", mim.nt, "Tx elements of the default ULA")->check(CLI::PositiveNumber);
    mimo_cmd->add_option("--nr", mim.nr, "Rx elements of the default ULA")->check(CLI::PositiveNumber);
    mimo_cmd->add_option("--out", mim.out, "JSON file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate_cmd) return simulate(sim);
        if (*scenario_cmd) return generate(scen);
        if (*export_cmd) return export_sql(exp);
        if (*plot_cmd) return plot(plt);
        if (*mimo_cmd) return mimo(mim);
    } catch (const uavprop::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
