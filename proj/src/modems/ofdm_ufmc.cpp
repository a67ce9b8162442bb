#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcwave/kernels.hpp"
#include "waveforms.hpp"

namespace mcwave::detail {

// ---------------------------------------------------------------- CP-OFDM

std::size_t OfdmModem::burst_length(std::size_t rows) const {
    return rows * static_cast<std::size_t>(cfg_.fft_size + cfg_.cp_len);
}

void OfdmModem::synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> body(n);
    for (std::size_t m = 0; m < grid.rows(); ++m) {
        dsp::idft(grid.row(m), body);
        cplx* dst = out.data() + m * (n + cp);
        for (std::size_t i = 0; i < cp; ++i) dst[i] = body[n - cp + i] * scale;
        for (std::size_t i = 0; i < n; ++i) dst[cp + i] = body[i] * scale;
    }
}

void OfdmModem::analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> z(n);
    for (std::size_t m = 0; m < out.rows(); ++m) {
        dsp::dft(burst.subspan(m * (n + cp) + cp, n), z);
        for (int k = block.first; k <= block.last(); ++k) out(m, static_cast<std::size_t>(k)) = z[k] * scale;
    }
}

// ---------------------------------------------------------------- UFMC

UfmcModem::UfmcModem(WaveformConfig cfg) : Modem(std::move(cfg)) {
    const int n = cfg_.fft_size;
    bands_ = cfg_.subbands;
    if (bands_.empty())
        for (int first = 0; first < n; first += cfg_.ufmc_subband_size)
            bands_.push_back({first, std::min(cfg_.ufmc_subband_size, n - first)});

    std::vector<double> f = cfg_.subband_filter->taps;
    double e = 0.0;
    for (double v : f) e += v * v;
    for (double& v : f) v /= std::sqrt(e);
    const int len = static_cast<int>(f.size());

    response_.assign(static_cast<std::size_t>(n), cplx{});
    std::vector<cplx> padded(2 * static_cast<std::size_t>(n));
    for (const auto& b : bands_) {
        const double centre = b.first + 0.5 * (b.count - 1);
        std::vector<cplx> fb(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i)
            fb[i] = f[i] * std::polar(1.0, 2.0 * std::numbers::pi * centre * (i - 0.5 * (len - 1)) / n);
        std::fill(padded.begin(), padded.end(), cplx{});
        std::copy(fb.begin(), fb.end(), padded.begin());
        dsp::dft(padded, padded);
        for (int k = b.first; k <= b.last(); ++k) response_[k] = padded[2 * static_cast<std::size_t>(k)];
        filters_.push_back(std::move(fb));
    }
}

std::size_t UfmcModem::burst_length(std::size_t rows) const { return rows * symbol_len(); }

void UfmcModem::synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t sym = symbol_len();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<char> covered(n, 0);
    for (const auto& b : bands_)
        for (int k = b.first; k <= b.last(); ++k) covered[k] = 1;
    for (std::size_t m = 0; m < grid.rows(); ++m)
        for (std::size_t k = 0; k < n; ++k)
            if (!covered[k] && grid(m, k) != cplx{})
                throw InvalidArgument("UFMC: data on subcarrier " + std::to_string(k) +
                                      " outside every subband (allocation must be a union of subbands)");

    std::vector<cplx> spec(n), x(n);
    for (std::size_t m = 0; m < grid.rows(); ++m) {
        cplx* dst = out.data() + m * sym;
        for (std::size_t bi = 0; bi < bands_.size(); ++bi) {
            const auto& b = bands_[bi];
            bool any = false;
            std::fill(spec.begin(), spec.end(), cplx{});
            for (int k = b.first; k <= b.last(); ++k) {
                spec[k] = grid(m, static_cast<std::size_t>(k));
                any = any || spec[k] != cplx{};
            }
            if (!any) continue;
            dsp::idft(spec, x);
            for (auto& v : x) v *= scale;
            // Linear convolution x * f_b, one scaled copy of x per tap.
            const auto& fb = filters_[bi];
            for (std::size_t t = 0; t < fb.size(); ++t) kernels::axpy(fb[t], x, {dst + t, n});
        }
    }
}

void UfmcModem::analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t sym = symbol_len();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> padded(2 * n);
    for (std::size_t m = 0; m < out.rows(); ++m) {
        std::fill(padded.begin(), padded.end(), cplx{});
        std::copy_n(burst.begin() + static_cast<std::ptrdiff_t>(m * sym), sym, padded.begin());
        dsp::dft(padded, padded);
        for (int k = block.first; k <= block.last(); ++k) {
            const cplx r = response_[k];
            out(m, static_cast<std::size_t>(k)) = r == cplx{} ? cplx{} : padded[2 * static_cast<std::size_t>(k)] * scale / r;
        }
    }
}

}  // namespace mcwave::detail
