#pragma once

// Multiuser uplink: block allocation, per-user impairments, superposition at
// the base station and extraction of the user of interest.

#include <cstdint>
#include <vector>

#include "mcwave/modems.hpp"

namespace mcwave {

struct Allocation {
    int fft_size = 0;
    int guard = 0;
    std::vector<SubcarrierBlock> blocks;
};

/// Equal contiguous blocks separated by `guard` empty subcarriers, the whole
/// run centred in [0, fft_size).
Allocation make_block_allocation(int num_users, int block_size, int guard, int fft_size);

struct UserSpec {
    std::size_t block = 0;
    int tau_samples = 0;
    double epsilon = 0.0;
    double power_weight = 1.0;
    std::uint64_t grid_seed = 0;
};

struct Scenario {
    WaveformConfig waveform;
    Allocation allocation;
    std::vector<UserSpec> users;
    std::size_t user_of_interest = 0;
    double noise_variance = 0.0;
    std::uint64_t noise_seed = 0;
    /// Multicarrier symbols per burst.
    std::size_t symbols = 7;

    void validate() const;
    const SubcarrierBlock& interest_block() const { return allocation.blocks.at(users.at(user_of_interest).block); }
    /// Symbol rows that carry data (row 0 of each packet is dropped when
    /// zero_first_symbol applies).
    std::vector<std::size_t> payload_rows() const;
};

/// Waveform configuration used by one user. For UFMC the user's block is cut
/// into subbands of ufmc_subband_size; other waveforms are unchanged.
WaveformConfig user_waveform(const Scenario& s, std::size_t user);

/// Deterministic 64-bit seed for (master, a, b) via SplitMix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

struct UserTransmission {
    SymbolGrid grid;
    /// Payload bits, row-major over payload rows then block subcarriers.
    std::vector<std::uint8_t> bits;
    double gain = 1.0;
};

struct Received {
    /// BS observation window: the user of interest's burst span.
    ComplexBuffer buffer;
    std::vector<UserTransmission> users;
};

struct SynthesisOptions {
    /// Draw the user of interest's data (and its gain) but leave its burst
    /// out of the sum, so the window holds interference and noise only.
    bool mute_interest = false;
};

/// y = sum_l sqrt(w_l) * cfo(delay(x_l)) + noise, on absolute sample indices.
Received synthesize_received(const Scenario& s, SynthesisOptions opts = {});

/// Demodulates the window for the user of interest. Returns rows x block
/// width, one-tap compensated with `interest_gain`.
SymbolGrid bs_receive(const Scenario& s, const ComplexBuffer& window, double interest_gain);

}  // namespace mcwave
