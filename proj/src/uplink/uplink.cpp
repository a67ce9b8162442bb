#include <cmath>
#include <random>
#include <string>

#include "mcwave/uplink.hpp"

namespace mcwave {

Allocation make_block_allocation(int num_users, int block_size, int guard, int fft_size) {
    if (num_users < 1) throw InvalidArgument("make_block_allocation: num_users must be positive");
    if (block_size < 1) throw InvalidArgument("make_block_allocation: block_size must be positive");
    if (guard < 0) throw InvalidArgument("make_block_allocation: guard must be non-negative");
    const long used = static_cast<long>(num_users) * block_size + static_cast<long>(num_users - 1) * guard;
    if (used > fft_size)
        throw InvalidArgument("make_block_allocation: num_users * block_size + (num_users - 1) * guard = " +
                              std::to_string(used) + " exceeds fft_size " + std::to_string(fft_size));
    Allocation a{fft_size, guard, {}};
    int first = static_cast<int>((fft_size - used) / 2);
    for (int u = 0; u < num_users; ++u) {
        a.blocks.push_back({first, block_size});
        first += block_size + guard;
    }
    return a;
}

void Scenario::validate() const {
    waveform.validate();
    if (allocation.fft_size != waveform.fft_size) throw InvalidArgument("Scenario: allocation fft_size differs from waveform");
    for (std::size_t i = 0; i < allocation.blocks.size(); ++i) {
        const auto& b = allocation.blocks[i];
        if (b.first < 0 || b.count < 1 || b.last() >= allocation.fft_size)
            throw InvalidArgument("Scenario: allocation block outside the band");
        if (i > 0 && b.first <= allocation.blocks[i - 1].last())
            throw InvalidArgument("Scenario: allocation blocks overlap or are unsorted");
    }
    if (users.empty()) throw InvalidArgument("Scenario: no users");
    if (user_of_interest >= users.size()) throw InvalidArgument("Scenario: user_of_interest out of range");
    for (const auto& u : users) {
        if (u.block >= allocation.blocks.size()) throw InvalidArgument("Scenario: user block index out of range");
        if (!(u.power_weight > 0.0) || !std::isfinite(u.power_weight))
            throw InvalidArgument("Scenario: power_weight must be positive");
        if (!std::isfinite(u.epsilon)) throw InvalidArgument("Scenario: epsilon must be finite");
    }
    const auto& ui = users[user_of_interest];
    if (ui.tau_samples != 0 || ui.epsilon != 0.0)
        throw InvalidArgument("Scenario: the user of interest must have tau = 0 and epsilon = 0");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw InvalidArgument("Scenario: noise_variance must be finite and non-negative");
    const auto gran = static_cast<std::size_t>(waveform.row_granularity());
    if (symbols == 0 || symbols % gran != 0)
        throw InvalidArgument("Scenario: symbols must be a positive multiple of " + std::to_string(gran));
}

std::vector<std::size_t> Scenario::payload_rows() const {
    const auto gran = static_cast<std::size_t>(waveform.row_granularity());
    const bool skip = waveform.zero_first_symbol && gran > 1;
    std::vector<std::size_t> rows;
    for (std::size_t m = 0; m < symbols; ++m)
        if (!(skip && m % gran == 0)) rows.push_back(m);
    return rows;
}

WaveformConfig user_waveform(const Scenario& s, std::size_t user) {
    WaveformConfig cfg = s.waveform;
    if (cfg.kind == WaveformKind::Ufmc) {
        const auto& b = s.allocation.blocks.at(s.users.at(user).block);
        cfg.subbands.clear();
        for (int first = b.first; first <= b.last(); first += cfg.ufmc_subband_size)
            cfg.subbands.push_back({first, std::min(cfg.ufmc_subband_size, b.last() + 1 - first)});
    }
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ a) ^ b);
}

Received synthesize_received(const Scenario& s, SynthesisOptions opts) {
    s.validate();
    const auto payload = s.payload_rows();
    Received out;
    std::size_t window_len = 0;
    {
        const auto m = make_modem(user_waveform(s, s.user_of_interest));
        window_len = m->burst_length(s.symbols);
    }
    out.buffer = ComplexBuffer(window_len, 0);

    for (std::size_t u = 0; u < s.users.size(); ++u) {
        const auto& spec = s.users[u];
        const auto& block = s.allocation.blocks[spec.block];
        UserTransmission tx;
        tx.grid = SymbolGrid(s.symbols, static_cast<std::size_t>(s.waveform.fft_size));
        tx.bits.resize(payload.size() * static_cast<std::size_t>(block.count) * 4);
        std::mt19937_64 rng(spec.grid_seed);
        for (std::size_t i = 0; i < tx.bits.size(); i += 64) {
            const std::uint64_t word = rng();
            for (std::size_t j = 0; j < 64 && i + j < tx.bits.size(); ++j) tx.bits[i + j] = (word >> j) & 1U;
        }
        const auto syms = dsp::map_qam16(tx.bits);
        std::size_t idx = 0;
        for (std::size_t m : payload)
            for (int k = block.first; k <= block.last(); ++k) tx.grid(m, static_cast<std::size_t>(k)) = syms[idx++];

        const auto modem = make_modem(user_waveform(s, u));
        auto mod = modem->modulate(tx.grid);
        tx.gain = mod.gain;
        if (!(opts.mute_interest && u == s.user_of_interest)) {
            auto shifted = dsp::apply_timing_offset(mod.burst, spec.tau_samples);
            if (!shifted.fully_advanced) {
                const ComplexBuffer rotated = spec.epsilon == 0.0
                                                  ? std::move(shifted.buffer)
                                                  : dsp::apply_cfo(shifted.buffer, spec.epsilon, s.waveform.fft_size);
                // apply_timing_offset keeps the origin, so a delay shows up as
                // leading zeros and an advance as dropped leading samples.
                dsp::accumulate(out.buffer, rotated, std::sqrt(spec.power_weight));
            }
        }
        out.users.push_back(std::move(tx));
    }
    if (s.noise_variance > 0.0) out.buffer = dsp::add_awgn(out.buffer, s.noise_variance, s.noise_seed);
    return out;
}

SymbolGrid bs_receive(const Scenario& s, const ComplexBuffer& window, double interest_gain) {
    const auto modem = make_modem(user_waveform(s, s.user_of_interest));
    const auto& block = s.interest_block();
    const auto full = modem->demodulate(window, s.symbols, interest_gain, block);
    return full.columns(static_cast<std::size_t>(block.first), static_cast<std::size_t>(block.count));
}

}  // namespace mcwave
