// Command-line front end: forward studies, synthetic observations,
// gradient studies, inversions, and field export. Every run writes its
// artifacts plus a manifest.json with content hashes into --out.

#include "voidwave/experiments.hpp"
#include "voidwave/presets.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace voidwave;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out = "out";
    int threads = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    auto* config =
        cmd->add_option("--config", args.config_path, "configuration file")
            ->check(CLI::ExistingFile);
    auto* preset =
        cmd->add_option("--preset", args.preset, "built-in configuration (see README)");
    config->excludes(preset);
    preset->excludes(config);
    cmd->add_option("--out", args.out, "output directory")->capture_default_str();
    cmd->add_option("--threads", args.threads, "worker threads for the per-source loops")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--set", args.overrides, "override a config entry (section.key=value)");
}

Config load_config(const CommonArgs& args) {
    if (args.config_path.empty() && args.preset.empty()) {
        throw ConfigError("one of --config or --preset is required");
    }
    Config config = args.preset.empty()
                        ? Config::parse_file(args.config_path)
                        : Config::parse_string(preset_text(args.preset), "preset:" + args.preset);
    for (const std::string& assignment : args.overrides) {
        config.set_override(assignment);
    }
    return config;
}

std::string short_real(Real value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6e", value);
    return buffer;
}

void run_forward(const CommonArgs& args, const std::string& command) {
    const Config config = load_config(args);
    ArtifactManifest manifest(args.out);
    const ForwardStudyReport report = run_forward_study(config, &manifest);
    manifest.write(command);

    for (const ForwardStudyCase& item : report.cases) {
        for (const StudySnapshotError& err : item.errors) {
            char stamp[32];
            std::snprintf(stamp, sizeof(stamp), "%g", err.time);
            std::cout << item.scaling << " p=" << item.degree << "  t=" << stamp << " s";
            if (report.kind == "interface_1d") {
                std::cout << "  relative L2 error " << short_real(err.relative_l2);
            }
            std::cout << "\n";
        }
        if (report.kind == "interface_1d") {
            std::cout << item.scaling << " p=" << item.degree << "  void max |u| after rest "
                      << short_real(item.void_rest_max) << "\n";
        }
    }
    std::cout << "artifacts: " << manifest.directory().string() << "\n";
}

void run_observe(const CommonArgs& args, const std::string& command) {
    const Config config = load_config(args);
    ExperimentSetup setup = load_setup(config);
    config.reject_unused();
    setup.threads = args.threads;

    ArtifactManifest manifest(args.out);
    const ObservationSet set = generate_observations(setup);
    write_observations(set, manifest);
    manifest.write(command);
    std::cout << set.recordings.size() << " recordings (" << set.provenance << ")\n"
              << "artifacts: " << manifest.directory().string() << "\n";
}

void run_gradient(const CommonArgs& args, const std::string& command) {
    const Config config = load_config(args);
    ArtifactManifest manifest(args.out);
    const GradientStudyReport report = idealized_gradient_study(config, &manifest, args.threads);
    manifest.write(command);

    for (const GradientStudyCase& item : report.cases) {
        std::cout << item.scaling << ": mean gradient inside the defect "
                  << short_real(item.void_mean)
                  << (item.void_mean > 0.0 ? "  (pushes gamma down)" : "  (pushes gamma up)")
                  << "\n";
    }
    std::cout << "artifacts: " << manifest.directory().string() << "\n";
}

void run_invert(const CommonArgs& args, const std::string& command) {
    const Config config = load_config(args);
    ExperimentSetup setup = load_setup(config);
    config.reject_unused();
    setup.threads = args.threads;

    ArtifactManifest manifest(args.out);
    const auto progress = [](const InversionState& state) {
        if (state.iterations == 1) {
            const IterationRecord& start = state.trace.front();
            std::cout << "iter   0  chi " << short_real(start.objective) << "  chi/chi0 "
                      << short_real(start.normalized_objective) << "\n";
        }
        const IterationRecord& rec = state.trace.back();
        char line[160];
        std::snprintf(line, sizeof(line),
                      "iter %3d  chi %.6e  chi/chi0 %.6e  |proj grad| %.3e  step %g",
                      rec.iteration, rec.objective, rec.normalized_objective,
                      rec.projected_gradient_norm, rec.step_length);
        std::cout << line << "\n";
    };
    const InversionRun run = run_inversion_experiment(setup, &manifest, nullptr, progress);
    manifest.write(command);

    std::cout << "stopped after " << run.state.iterations
              << " iterations: " << run.state.stop_reason << "\n"
              << "normalized objective "
              << short_real(run.state.objective /
                            std::max(run.state.initial_objective, 1e-300))
              << "\n"
              << "artifacts: " << manifest.directory().string() << "\n";
}

struct ExportArgs {
    std::string field;
    std::string format = "csv_grid";
    std::string out = "out";
};

void run_export(const ExportArgs& args, const std::string& command) {
    const ExportFormat format = parse_export_format(args.format);
    const std::string extension = format == ExportFormat::csv_grid ? ".csv" : ".vtk";
    const std::string name =
        std::filesystem::path(args.field).filename().replace_extension(extension).string();

    ArtifactManifest manifest(args.out);
    export_field_file(args.field, manifest.resolve(name), format);
    manifest.add(name);
    manifest.write(command);
    std::cout << "wrote " << manifest.resolve(name).string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    std::string command;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) command += ' ';
        command += argv[i];
    }

    CLI::App app{"voidwave: full waveform inversion of voids in immersed scalar-wave media"};
    app.require_subcommand(1);

    CommonArgs common;
    ExportArgs export_args;

    CLI::App* forward = app.add_subcommand(
        "forward", "wave propagation study on a known defect (1D interface or 2D plate)");
    add_common(forward, common);
    CLI::App* observe = app.add_subcommand(
        "observe", "synthetic transducer recordings on the refined reference model");
    add_common(observe, common);
    CLI::App* gradient = app.add_subcommand(
        "gradient", "first-iteration misfit gradients per parametrization");
    add_common(gradient, common);
    CLI::App* invert =
        app.add_subcommand("invert", "reconstruct the defect's scaling field from recordings");
    add_common(invert, common);

    CLI::App* export_cmd =
        app.add_subcommand("export", "convert a stored nodal field for plotting");
    export_cmd->add_option("--field", export_args.field, "nodal field file")
        ->required()
        ->check(CLI::ExistingFile);
    export_cmd->add_option("--format", export_args.format, "csv_grid or vtk_legacy_ascii")
        ->capture_default_str();
    export_cmd->add_option("--out", export_args.out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (forward->parsed()) run_forward(common, command);
        if (observe->parsed()) run_observe(common, command);
        if (gradient->parsed()) run_gradient(common, command);
        if (invert->parsed()) run_invert(common, command);
        if (export_cmd->parsed()) run_export(export_args, command);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const voidwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const voidwave::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
