#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "greenlab/calibration.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/params_io.hpp"
#include "greenlab/simulator.hpp"
#include "greenlab/targets.hpp"

namespace fs = std::filesystem;
using namespace greenlab;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

int run_simulate(const std::string& params_path, int horizon, const std::string& out,
                 std::vector<int> snapshots, bool snapshots_given, double angle,
                 bool to_stdout) {
    const ParameterSet params = parse_params(read_file(params_path));
    if (horizon < 1) throw InputError("horizon must be at least 1");
    if (!snapshots_given) {
        std::erase_if(snapshots, [&](int gc) { return gc > horizon; });
    } else {
        for (int gc : snapshots)
            if (gc < 1 || gc > horizon)
                throw InputError("snapshot cycle " + std::to_string(gc) +
                                 " is outside the horizon");
    }

    const SimulationTrace trace = run(params, horizon);
    const fs::path dir = prepare_out_dir(out);

    const std::string trace_text = trace_csv(trace, params);
    write_file(dir / "trace.csv", trace_text);
    for (int gc : snapshots) {
        const Skeleton sk =
            snapshot_geometry(trace.states[static_cast<std::size_t>(gc - 1)], params, angle);
        write_file(dir / ("skeleton_gc" + std::to_string(gc) + ".txt"), skeleton_text(sk));
    }
    write_file(dir / "sink_curves.csv", sink_curves_csv(params));

    if (to_stdout) std::cout << trace_text;
    std::cerr << "simulated " << horizon << " cycles, " << snapshots.size()
              << " skeleton snapshot(s) -> " << dir.string() << "\n";
    return 0;
}

int run_synth(const std::string& params_path, std::vector<int> stages, int horizon,
              double noise, std::uint64_t seed, const std::string& out, bool to_stdout) {
    const ParameterSet params = parse_params(read_file(params_path));
    if (stages.empty()) throw InputError("at least one stage is required");
    const int max_stage = *std::max_element(stages.begin(), stages.end());
    if (horizon == 0) horizon = max_stage;
    if (horizon < 1) throw InputError("horizon must be at least 1");
    if (max_stage > horizon)
        throw InputError("stage " + std::to_string(max_stage) + " is beyond the horizon " +
                         std::to_string(horizon));

    const SimulationTrace trace = run(params, horizon);
    const TargetSet targets = synthesize_targets(trace, params, stages, noise, seed);
    const fs::path dir = prepare_out_dir(out);
    const std::string text = write_targets(targets);
    write_file(dir / "targets.csv", text);

    if (to_stdout) std::cout << text;
    std::cerr << "synthesized " << targets.records.size() << " target records -> "
              << (dir / "targets.csv").string() << "\n";
    return 0;
}

int run_fit(const std::string& params_path, const std::string& targets_path,
            const std::string& config_path, const std::string& out, bool to_stdout) {
    const ParameterSet params = parse_params(read_file(params_path));
    const TargetSet targets =
        parse_targets(read_file(targets_path), params.treatment, params.branches);
    const FitConfig config = parse_fit_config(read_file(config_path));

    const FitResult result = fit(config, params, targets);
    const fs::path dir = prepare_out_dir(out);
    const std::string text = write_fit_result(result);
    write_file(dir / "fit_result.params", text);
    write_file(dir / "residuals.csv", residuals_csv(result));

    if (to_stdout) std::cout << text;
    std::cerr << "fit " << result.free_names.size() << " parameter(s), rss = " << result.rss
              << ", evals = " << result.evaluations << " -> " << dir.string() << "\n";
    return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path, const std::string& out,
                bool to_stdout) {
    const ParameterSet a = parse_params(read_file(a_path));
    const ParameterSet b = parse_params(read_file(b_path));
    const std::string text = comparison_csv(a, b);

    const fs::path dir = prepare_out_dir(out);
    write_file(dir / "comparison.csv", text);
    if (to_stdout) std::cout << text;
    std::cerr << "compared " << a_path << " vs " << b_path << " -> "
              << (dir / "comparison.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Growth-cycle simulator and calibrator for pruned cotton"};
    app.require_subcommand(1);

    std::string params_path, targets_path, config_path, out_dir = "out";
    std::string compare_a, compare_b;
    int horizon = 35;
    int synth_horizon = 0;
    std::vector<int> snapshots{18, 25, 30, 35};
    std::vector<int> stages{18, 25, 30, 35};
    double angle = 45.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    bool to_stdout = false;

    app.add_flag("--stdout", to_stdout, "also print the primary output to stdout");

    auto* sim = app.add_subcommand("simulate", "run the growth model and export the trace");
    sim->add_option("--params", params_path, "parameter file")->required();
    sim->add_option("--horizon", horizon, "number of growth cycles");
    auto* snap_opt = sim->add_option("--snapshots", snapshots, "cycles to export skeletons at");
    sim->add_option("--angle", angle, "branch insertion angle, degrees");
    sim->add_option("--out", out_dir, "output directory");

    auto* synth = app.add_subcommand("synth", "synthesize a target file from a simulation");
    synth->add_option("--params", params_path, "parameter file")->required();
    synth->add_option("--stages", stages, "measurement stages, growth cycles");
    synth->add_option("--horizon", synth_horizon, "simulated cycles (default: last stage)");
    synth->add_option("--noise", noise, "relative gaussian noise sd");
    synth->add_option("--seed", seed, "noise seed");
    synth->add_option("--out", out_dir, "output directory");

    auto* fit_cmd = app.add_subcommand("fit", "estimate hidden parameters from targets");
    fit_cmd->add_option("--params", params_path, "parameter file with initial values")->required();
    fit_cmd->add_option("--targets", targets_path, "target CSV")->required();
    fit_cmd->add_option("--config", config_path, "fit configuration file")->required();
    fit_cmd->add_option("--out", out_dir, "output directory");

    auto* cmp = app.add_subcommand("compare", "tabulate two parameter files side by side");
    cmp->add_option("a", compare_a, "first parameter or fit-result file")->required();
    cmp->add_option("b", compare_b, "second parameter or fit-result file")->required();
    cmp->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(params_path, horizon, out_dir, snapshots, snap_opt->count() > 0,
                                angle, to_stdout);
        if (synth->parsed())
            return run_synth(params_path, stages, synth_horizon, noise, seed, out_dir, to_stdout);
        if (fit_cmd->parsed())
            return run_fit(params_path, targets_path, config_path, out_dir, to_stdout);
        if (cmp->parsed()) return run_compare(compare_a, compare_b, out_dir, to_stdout);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
