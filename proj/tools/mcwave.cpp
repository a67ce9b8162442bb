// mcwave: run multicarrier MAI / BER experiments and write CSV results.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mcwave/experiment.hpp"

namespace {

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores); results do not depend on it");
    cmd->add_flag("--quiet", o.quiet, "No per-point log on stderr");
}

int run(mcwave::ExperimentConfig cfg, const Overrides& o) {
    if (o.out) cfg.output = *o.out;
    if (o.trials) cfg.trials = *o.trials;
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    mcwave::RunOptions opts{o.threads, o.quiet ? nullptr : &std::cerr};
    for (const auto& p : mcwave::run_experiment(cfg, opts)) std::cout << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multicarrier waveform MAI / BER laboratory"};
    app.require_subcommand(1);

    Overrides preset_o, run_o;
    std::string preset_name, config_path;

    auto* preset = app.add_subcommand("preset", "Run a named reference experiment");
    std::string names;
    for (const auto& n : mcwave::preset_names()) names += (names.empty() ? "" : ", ") + n;
    preset->add_option("name", preset_name, "One of: " + names)->required();
    add_common(preset, preset_o);

    auto* runc = app.add_subcommand("run", "Run an experiment from a JSON config (or an mcwave CSV header)");
    runc->add_option("config", config_path, "Config file")->required();
    add_common(runc, run_o);

    auto* filters = app.add_subcommand("filters", "Print prototype filter taps as CSV");
    std::string design;
    mcwave::FilterDumpOptions fopt;
    std::optional<std::string> fout;
    filters->add_option("--dump", design, "rrc, dolph-chebyshev or phydyas")->required();
    filters->add_option("--fft-size", fopt.fft_size, "Samples per symbol");
    filters->add_option("--taps", fopt.taps, "Tap count (rrc, dolph-chebyshev)");
    filters->add_option("--rolloff", fopt.rolloff, "RRC roll-off");
    filters->add_option("--attenuation", fopt.attenuation_db, "Dolph-Chebyshev sidelobe attenuation in dB");
    filters->add_option("--overlap", fopt.overlap, "PHYDYAS overlap factor");
    filters->add_option("--out", fout, "Write to this file instead of stdout");

    auto* list = app.add_subcommand("presets", "List preset names");
    auto* show = app.add_subcommand("show-preset", "Print a preset's config as JSON");
    std::string show_name;
    show->add_option("name", show_name)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*preset) return run(mcwave::preset_config(preset_name), preset_o);
        if (*runc) return run(mcwave::load_config(config_path), run_o);
        if (*filters) {
            const std::string csv = mcwave::dump_filter_csv(design, fopt);
            if (fout) {
                std::ofstream f(*fout, std::ios::binary);
                if (!(f << csv)) throw std::runtime_error("cannot write " + *fout);
            } else {
                std::cout << csv;
            }
            return 0;
        }
        if (*list) {
            for (const auto& n : mcwave::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*show) {
            std::cout << mcwave::serialize_config(mcwave::preset_config(show_name)) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "mcwave: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
