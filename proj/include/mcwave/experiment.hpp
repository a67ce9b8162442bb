#pragma once

// Config-driven experiments and their CSV output (the engine behind the CLI).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mcwave/metrics.hpp"

namespace mcwave {

enum class ExperimentKind { MaiSweep, SymbolMai, FilterSpectra, Ber };

std::string_view experiment_name(ExperimentKind k);

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentKind experiment = ExperimentKind::MaiSweep;
    std::vector<WaveformKind> waveforms;

    // waveform
    int fft_size = 256;
    int cp_len = 32;
    std::size_t symbols = 7;
    int ufmc_filter_taps = 33;
    double ufmc_attenuation_db = 40.0;
    int ufmc_subband_size = 12;
    int fbmc_overlap = 4;
    /// K for GFDM and C-FBMC; also the C-FBMC prototype overlap.
    int symbols_per_packet = 7;
    double gfdm_rolloff = 0.4;
    GfdmReceiver gfdm_receiver = GfdmReceiver::ZeroForcing;
    bool zero_first_symbol = false;

    // allocation
    int num_users = 2;
    int block_size = 36;
    int guard = 1;
    int user_of_interest = 0;

    // interferers (every user except the user of interest)
    double interferer_tau = 0.0;  // fraction of fft_size
    double interferer_epsilon = 0.0;
    double interferer_power_weight = 1.0;

    // sweep: "tau" or "epsilon" for mai_sweep, "ebn0_db" for ber
    std::string sweep_axis = "tau";
    double sweep_start = 0.0;
    double sweep_stop = 0.5;
    std::size_t sweep_points = 65;
    OffsetPolicy policy = OffsetPolicy::Fixed;

    // filter_spectra
    int spectrum_subcarrier = 128;

    std::size_t trials = 500;
    std::uint64_t seed = 1;
    /// Output directory; not part of the embedded CSV header.
    std::string output = ".";

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

std::vector<std::string> preset_names();
/// Throws InvalidArgument listing the available presets for unknown names.
ExperimentConfig preset_config(std::string_view name);

/// JSON text. `include_output` false drops the output path (CSV headers).
std::string serialize_config(const ExperimentConfig& cfg, bool include_output = true, bool pretty = true);
/// Parses JSON; schema violations name the field.
ExperimentConfig parse_config(std::string_view text);
/// Reads a JSON config, or recovers the config embedded in a CSV header.
ExperimentConfig load_config(const std::filesystem::path& path);

WaveformConfig build_waveform(const ExperimentConfig& cfg, WaveformKind kind);
Scenario build_scenario(const ExperimentConfig& cfg, WaveformKind kind);

struct RunOptions {
    unsigned threads = 1;
    /// One line per sweep point when set.
    std::ostream* log = nullptr;
};

/// Full CSV text for one waveform of the experiment.
std::string render_csv(const ExperimentConfig& cfg, WaveformKind kind, const RunOptions& opts = {});

/// Writes <output>/<name>_<waveform>.csv for every waveform; returns paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Taps of a named design ("rrc", "dolph-chebyshev", "phydyas") as CSV.
struct FilterDumpOptions {
    int fft_size = 256;
    int taps = 0;           // 0: design default
    double rolloff = 0.4;
    double attenuation_db = 40.0;
    int overlap = 4;
};
std::string dump_filter_csv(std::string_view design, const FilterDumpOptions& opts);

}  // namespace mcwave
