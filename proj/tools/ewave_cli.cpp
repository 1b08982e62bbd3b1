// ewave: run backscatter-authentication scenarios and emit CSV / traces.
//
// Exit status: 0 all built-in checks passed, 1 a check failed, 2 config or
// I/O error.

#include "ewave/config.hpp"
#include "ewave/errors.hpp"
#include "ewave/experiment.hpp"
#include "ewave/protocol.hpp"
#include "ewave/trace_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitConfigError = 2;

int list_presets()
{
    for (const auto& name : ewave::config::preset_names()) {
        std::cout << "[" << name << "]\n" << ewave::config::preset_text(name) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Backscatter physical-layer authentication simulator"};
    app.require_subcommand(0, 1);

    bool list = false;
    app.add_flag("--list-presets", list, "Print the built-in presets and exit");

    auto* run = app.add_subcommand("run", "Run a scenario (and its sweep, if any)");
    std::string config_path;
    std::string out_path;
    std::string trace_path;
    std::string log_path;
    std::string preset;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    run->add_option("config", config_path, "Scenario config file");
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_option("--trace-out", trace_path, "Write the base scenario's monitor trace here");
    run->add_option("--log-out", log_path, "Write session records of every point here");
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--preset", preset, "Run a built-in preset instead of a config file")
        ->check(CLI::IsMember({"wired", "anechoic"}));
    run->add_option("--threads", threads, "Sweep worker threads (0 = hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    if (list) {
        return list_presets();
    }
    if (!run->parsed()) {
        std::cerr << app.help();
        return kExitConfigError;
    }

    ewave::config::ScenarioConfig cfg;
    try {
        if (!preset.empty() && !config_path.empty()) {
            std::cerr << "error: give either a config file or --preset, not both\n";
            return kExitConfigError;
        }
        if (!preset.empty()) {
            cfg = ewave::config::load_config("setup = " + preset + "\n");
        } else if (!config_path.empty()) {
            cfg = ewave::config::load_config_file(config_path);
        } else {
            std::cerr << "error: a config file or --preset is required\n";
            return kExitConfigError;
        }
        if (seed_opt->count() > 0) {
            cfg = ewave::config::with_seed(cfg, seed);
        }
    } catch (const ewave::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    for (const auto& w : cfg.warnings) {
        std::cerr << "warning: " << w << "\n";
    }

    try {
        const auto result = ewave::experiment::run_experiment(cfg, threads);
        if (out_path.empty()) {
            std::cout << ewave::experiment::to_csv(result);
        } else {
            ewave::experiment::write_csv(out_path, result);
        }
        if (!trace_path.empty()) {
            ewave::waveform::save_trace(trace_path, ewave::experiment::emit_trace(cfg));
        }
        if (!log_path.empty()) {
            std::ofstream log(log_path, std::ios::binary);
            if (!log) {
                throw ewave::Error("cannot open " + log_path + " for writing");
            }
            for (const auto& p : result.points) {
                if (p.session) {
                    log << ewave::protocol::to_records(*p.session);
                }
            }
        }
        std::cerr << ewave::experiment::summary_json(result) << "\n";
        return result.all_passed() ? 0 : kExitChecksFailed;
    } catch (const ewave::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
