#pragma once

// Monte Carlo MAI and BER estimation, and the TO / CFO / Eb/N0 sweeps.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcwave/uplink.hpp"

namespace mcwave {

struct MetricRecord {
    std::string axis;  // "tau", "epsilon", "ebn0_db" or empty
    double x = 0.0;
    /// MAI power in dB (estimate_mai_power, mai_sweep) or BER.
    double value = 0.0;
    std::size_t trials = 0;
    /// BER only.
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    /// BER only: fewer than 100 error events behind this point.
    bool low_error_count = false;
};

/// Monte Carlo settings shared by the estimators. Trial t draws user u's data
/// from derive_seed(seed, t, u); the scenario's own grid seeds are ignored.
struct MonteCarlo {
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 1;
};

/// Mean |X_hat|^2 over the interest block and payload rows with the user of
/// interest muted, relative to unit symbol power, in dB. Rejects scenarios
/// with noise.
MetricRecord estimate_mai_power(const Scenario& s, const MonteCarlo& mc);

/// Same estimator resolved per symbol row m (all rows, including any that
/// zero_first_symbol switches off). dB per row.
std::vector<double> per_symbol_mai(const Scenario& s, const MonteCarlo& mc);

enum class SweepAxis { TimingOffset, Cfo };

/// Every user other than the user of interest receives the swept offset.
/// TO values are fractions of fft_size, rounded to whole samples; CFO values
/// are in subcarrier spacings. `values` are the grid points.
std::vector<MetricRecord> mai_sweep(const Scenario& tmpl, SweepAxis axis, const std::vector<double>& values,
                                    const MonteCarlo& mc);

/// num_points evenly spaced values on [lo, hi] (inclusive).
std::vector<double> linspace(double lo, double hi, std::size_t num_points);

enum class OffsetPolicy {
    /// Offsets from the scenario as given.
    Fixed,
    /// TO and CFO uniform in [-0.5, 0.5] per interferer and trial.
    Async,
    /// TO uniform inside the waveform's tolerance zone, CFO in [-0.5, 0.5].
    QuasiSync,
};

std::string_view policy_name(OffsetPolicy p);
OffsetPolicy parse_policy(std::string_view name);

/// TO zone, in samples, used by the quasi-synchronous policy: [0, cp] for
/// OFDM / GFDM / C-FBMC, +-0.02 N for UFMC, +-0.5 N for FBMC.
std::pair<int, int> quasi_sync_tau_range(const WaveformConfig& cfg);

/// Eb = energy of the interest burst (CP and tails included) / payload bits;
/// noise variance = Eb / 10^(EbN0/10). Data and offsets are shared across the
/// Eb/N0 points of a trial; noise is drawn per point.
std::vector<MetricRecord> run_ber(const Scenario& tmpl, const std::vector<double>& ebn0_db, OffsetPolicy policy,
                                  const MonteCarlo& mc);

/// Ratio, in dB, of the burst energy per bit to the energy per bit seen by a
/// unit-energy per-subcarrier detector (10 log10((N + CP) / N) for OFDM).
/// The unit-power scaling makes the ratio data dependent, so it is averaged
/// in dB over `draws` payloads. Subtract it from an Eb/N0 axis to move to the
/// payload-only convention.
double eb_overhead_db(const Scenario& s, std::size_t draws = 64);

/// Closed-form Gray 16-QAM bit error probability in AWGN.
double qam16_ber_awgn(double ebn0_db);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace mcwave
