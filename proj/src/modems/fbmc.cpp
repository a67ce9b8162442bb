#include <algorithm>

#include "mcwave/kernels.hpp"
#include "waveforms.hpp"

namespace mcwave::detail {
namespace {

// Real half h of symbol row m: h = 2m takes the real part, h = 2m + 1 the
// imaginary part.
double real_half(const SymbolGrid& grid, std::size_t h, std::size_t k) {
    const cplx v = grid(h / 2, k);
    return h % 2 == 0 ? v.real() : v.imag();
}

void store_half(SymbolGrid& out, std::size_t h, std::size_t k, double v) {
    cplx& dst = out(h / 2, k);
    dst = h % 2 == 0 ? cplx(v, dst.imag()) : cplx(dst.real(), v);
}

}  // namespace

// ---------------------------------------------------------------- FBMC/OQAM
//
// Real half h on subcarrier k uses the basis
//   g[n - hN/2] exp(j2pi k (n - hN/2 - KN/2) / N) j^(h+k)
// with K the overlap factor.

FbmcModem::FbmcModem(WaveformConfig cfg) : Modem(std::move(cfg)), g_(cfg_.prototype->taps) {
    if (cfg_.fft_size % 2 != 0) throw InvalidArgument("FBMC requires an even fft_size");
}

std::size_t FbmcModem::burst_length(std::size_t rows) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    return (2 * rows - 1) * n / 2 + g_.size();
}

void FbmcModem::synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const long ovl = cfg_.overlap;
    std::vector<cplx> s(n), u(n);
    for (std::size_t h = 0; h < 2 * grid.rows(); ++h) {
        bool any = false;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = real_half(grid, h, k);
            any = any || a != 0.0;
            // exp(-j2pi k (KN/2) / N) = (-1)^(kK)
            const double sign = ((static_cast<long>(k) * ovl) % 2) ? -1.0 : 1.0;
            s[k] = a * sign * jpow(static_cast<long>(h + k));
        }
        if (!any) continue;
        dsp::idft(s, u);
        cplx* dst = out.data() + h * n / 2;
        for (long q = 0; q < ovl; ++q) kernels::mac_real(u, {g_.data() + q * n, n}, {dst + q * n, n});
    }
}

void FbmcModem::analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const long ovl = cfg_.overlap;
    std::vector<cplx> fold(n), z(n);
    for (std::size_t h = 0; h < 2 * out.rows(); ++h) {
        std::fill(fold.begin(), fold.end(), cplx{});
        const cplx* src = burst.data() + h * n / 2;
        for (long q = 0; q < ovl; ++q) kernels::mac_real({src + q * n, n}, {g_.data() + q * n, n}, fold);
        dsp::dft(fold, z);
        for (int k = block.first; k <= block.last(); ++k) {
            const double sign = ((static_cast<long>(k) * ovl) % 2) ? -1.0 : 1.0;
            store_half(out, h, static_cast<std::size_t>(k), (z[k] * sign * jpow(-static_cast<long>(h) - k)).real());
        }
    }
}

// ---------------------------------------------------------------- C-FBMC
//
// Same staggering on a circular K*N packet:
//   g_c[(n - hN/2) mod KN] exp(j2pi k n / N) j^(h+k),  one CP per packet.

CfbmcModem::CfbmcModem(WaveformConfig cfg) : Modem(std::move(cfg)) {
    const int n = cfg_.fft_size;
    if (n % 2 != 0) throw InvalidArgument("C-FBMC requires an even fft_size");
    const int len = cfg_.symbols_per_packet * n;
    const auto g = circularize(*cfg_.prototype, len);
    shifted_.resize(2 * static_cast<std::size_t>(cfg_.symbols_per_packet));
    for (std::size_t h = 0; h < shifted_.size(); ++h) {
        auto& v = shifted_[h];
        v.resize(static_cast<std::size_t>(len));
        const long shift = static_cast<long>(h) * n / 2;
        for (long i = 0; i < len; ++i) v[i] = g[((i - shift) % len + len) % len];
    }
}

std::size_t CfbmcModem::burst_length(std::size_t rows) const {
    const std::size_t packets = rows / static_cast<std::size_t>(cfg_.symbols_per_packet);
    return packets * static_cast<std::size_t>(cfg_.symbols_per_packet * cfg_.fft_size + cfg_.cp_len);
}

void CfbmcModem::synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t kp = static_cast<std::size_t>(cfg_.symbols_per_packet);
    const std::size_t len = kp * n;
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    std::vector<cplx> s(n), u(n), x(len);
    for (std::size_t p = 0; p < grid.rows() / kp; ++p) {
        std::fill(x.begin(), x.end(), cplx{});
        for (std::size_t h = 0; h < 2 * kp; ++h) {
            bool any = false;
            for (std::size_t k = 0; k < n; ++k) {
                const double a = real_half(grid, 2 * p * kp + h, k);
                any = any || a != 0.0;
                s[k] = a * jpow(static_cast<long>(h + k));
            }
            if (!any) continue;
            dsp::idft(s, u);
            for (std::size_t q = 0; q < kp; ++q)
                kernels::mac_real(u, {shifted_[h].data() + q * n, n}, {x.data() + q * n, n});
        }
        cplx* dst = out.data() + p * (len + cp);
        std::copy(x.end() - static_cast<std::ptrdiff_t>(cp), x.end(), dst);
        std::copy(x.begin(), x.end(), dst + cp);
    }
}

void CfbmcModem::analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t kp = static_cast<std::size_t>(cfg_.symbols_per_packet);
    const std::size_t len = kp * n;
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    std::vector<cplx> fold(n), z(n);
    for (std::size_t p = 0; p < out.rows() / kp; ++p) {
        const cplx* y = burst.data() + p * (len + cp) + cp;
        for (std::size_t h = 0; h < 2 * kp; ++h) {
            std::fill(fold.begin(), fold.end(), cplx{});
            for (std::size_t q = 0; q < kp; ++q)
                kernels::mac_real({y + q * n, n}, {shifted_[h].data() + q * n, n}, fold);
            dsp::dft(fold, z);
            for (int k = block.first; k <= block.last(); ++k)
                store_half(out, 2 * p * kp + h, static_cast<std::size_t>(k),
                           (z[k] * jpow(-static_cast<long>(h) - k)).real());
        }
    }
}

}  // namespace mcwave::detail
