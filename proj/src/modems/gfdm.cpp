#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "mcwave/kernels.hpp"
#include "waveforms.hpp"

namespace mcwave {
namespace {

using BasisKey = std::tuple<int, int, std::vector<double>>;

std::shared_ptr<const GfdmBasis> build_basis(int n, int kp, std::vector<double> pulse) {
    auto basis = std::make_shared<GfdmBasis>();
    basis->fft_size = n;
    basis->symbols = kp;
    basis->pulse = std::move(pulse);
    const auto dim = static_cast<lapack_int>(basis->dim());
    const auto d = static_cast<std::size_t>(dim);

    basis->a.resize(d * d);
    std::vector<cplx> tone(d);
    for (int k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < d; ++i)
            tone[i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k) * i) % n) / n);
        for (int m = 0; m < kp; ++m) {
            const std::size_t col = static_cast<std::size_t>(m) * n + k;
            const std::size_t shift = static_cast<std::size_t>(m) * n;
            for (std::size_t i = 0; i < d; ++i)
                basis->a[i * d + col] = basis->pulse[(i + d - shift) % d] * tone[i];
        }
    }

    basis->b = basis->a;
    std::vector<lapack_int> ipiv(d);
    const double anorm = LAPACKE_zlange(LAPACK_ROW_MAJOR, '1', dim, dim, basis->b.data(), dim);
    lapack_int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, dim, dim, basis->b.data(), dim, ipiv.data());
    if (info > 0) throw NumericalError("gfdm_build_matrix: modulation matrix is singular");
    if (info < 0) throw NumericalError("gfdm_build_matrix: zgetrf argument error");
    double rcond = 0.0;
    info = LAPACKE_zgecon(LAPACK_ROW_MAJOR, '1', dim, basis->b.data(), dim, anorm, &rcond);
    if (info != 0 || !(rcond > 0.0)) throw NumericalError("gfdm_build_matrix: condition estimate failed");
    basis->condition = 1.0 / rcond;
    if (basis->condition > 1e12)
        throw NumericalError("gfdm_build_matrix: condition number " + std::to_string(basis->condition) +
                             " exceeds 1e12");
    info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, dim, basis->b.data(), dim, ipiv.data());
    if (info != 0) throw NumericalError("gfdm_build_matrix: zgetri failed");
    return basis;
}

std::vector<double> magnitude_spectrum(std::vector<cplx> h) {
    dsp::dft(h, h);
    std::vector<double> mag(h.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) peak = std::max(peak, mag[i] = std::abs(h[i]));
    if (peak > 0.0)
        for (double& v : mag) v /= peak;
    return mag;
}

}  // namespace

std::shared_ptr<const GfdmBasis> gfdm_build_matrix(const WaveformConfig& cfg) {
    if (cfg.kind != WaveformKind::Gfdm && cfg.kind != WaveformKind::Cfbmc)
        throw InvalidArgument("gfdm_build_matrix: waveform must be GFDM or C-FBMC");
    cfg.validate();
    const int n = cfg.fft_size;
    const int kp = cfg.symbols_per_packet;
    BasisKey key{n, kp, circularize(*cfg.prototype, n * kp)};

    static std::mutex mu;
    static std::map<BasisKey, std::shared_ptr<const GfdmBasis>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto basis = build_basis(n, kp, std::get<2>(key));
    cache.emplace(std::move(key), basis);
    return basis;
}

std::vector<double> rx_filter_spectrum(const WaveformConfig& cfg, int k0) {
    if (cfg.kind != WaveformKind::Gfdm && cfg.kind != WaveformKind::Cfbmc)
        throw InvalidArgument("rx_filter_spectrum: waveform must be GFDM or C-FBMC");
    cfg.validate();
    const int n = cfg.fft_size;
    if (k0 < 0 || k0 >= n) throw InvalidArgument("rx_filter_spectrum: k0 outside [0, fft_size)");
    const std::size_t d = static_cast<std::size_t>(n) * cfg.symbols_per_packet;
    std::vector<cplx> h(d);
    if (cfg.kind == WaveformKind::Gfdm && cfg.gfdm_receiver == GfdmReceiver::ZeroForcing) {
        const auto basis = gfdm_build_matrix(cfg);
        const cplx* row = basis->b.data() + static_cast<std::size_t>(k0) * d;
        // The detector computes sum_n row[n] y[n]; as a correlator its filter is conj(row).
        for (std::size_t i = 0; i < d; ++i) h[i] = std::conj(row[i]);
    } else {
        const auto g = circularize(*cfg.prototype, static_cast<int>(d));
        for (std::size_t i = 0; i < d; ++i)
            h[i] = g[i] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k0) * i) % n) / n);
    }
    return magnitude_spectrum(std::move(h));
}

std::vector<double> leakage_of_windowed_tone(const LeakageWindow& w, int fft_size, int tone_bin, int tau_samples) {
    if (fft_size < 1) throw InvalidArgument("leakage_of_windowed_tone: fft_size must be positive");
    const std::vector<double> win = w.window ? w.window->taps : std::vector<double>(static_cast<std::size_t>(fft_size), 1.0);
    const long len = static_cast<long>(win.size());
    const long n = fft_size;
    double norm = 0.0;
    for (double v : win) norm += v * v;

    std::vector<cplx> fold(static_cast<std::size_t>(n));
    for (long i = 0; i < len; ++i) {
        const long j = i - tau_samples;
        if (j < 0 || j >= len) continue;
        const long ph = ((static_cast<long>(tone_bin) * j) % n + n) % n;
        fold[static_cast<std::size_t>(i % n)] += win[i] * win[j] * std::polar(1.0, 2.0 * std::numbers::pi * ph / n);
    }
    dsp::dft(fold, fold);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (long b = 0; b < n; ++b) p[b] = std::norm(fold[b]) / (norm * norm);
    return p;
}

namespace detail {

GfdmModem::GfdmModem(WaveformConfig cfg) : Modem(std::move(cfg)) {
    const int n = cfg_.fft_size;
    const int len = cfg_.symbols_per_packet * n;
    const auto g = circularize(*cfg_.prototype, len);
    shifted_.resize(static_cast<std::size_t>(cfg_.symbols_per_packet));
    for (std::size_t m = 0; m < shifted_.size(); ++m) {
        auto& v = shifted_[m];
        v.resize(static_cast<std::size_t>(len));
        const long shift = static_cast<long>(m) * n;
        for (long i = 0; i < len; ++i) v[i] = g[((i - shift) % len + len) % len];
    }
}

const GfdmBasis& GfdmModem::basis() const {
    std::call_once(basis_once_, [this] { basis_ = gfdm_build_matrix(cfg_); });
    return *basis_;
}

std::size_t GfdmModem::burst_length(std::size_t rows) const {
    const std::size_t packets = rows / static_cast<std::size_t>(cfg_.symbols_per_packet);
    return packets * static_cast<std::size_t>(cfg_.symbols_per_packet * cfg_.fft_size + cfg_.cp_len);
}

void GfdmModem::synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const {
    // x = A d, evaluated per symbol as a pulse-weighted periodic IDFT.
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t kp = static_cast<std::size_t>(cfg_.symbols_per_packet);
    const std::size_t len = kp * n;
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    std::vector<cplx> u(n), x(len);
    for (std::size_t p = 0; p < grid.rows() / kp; ++p) {
        std::fill(x.begin(), x.end(), cplx{});
        for (std::size_t m = 0; m < kp; ++m) {
            const auto row = grid.row(p * kp + m);
            if (std::all_of(row.begin(), row.end(), [](cplx v) { return v == cplx{}; })) continue;
            dsp::idft(row, u);
            for (std::size_t q = 0; q < kp; ++q)
                kernels::mac_real(u, {shifted_[m].data() + q * n, n}, {x.data() + q * n, n});
        }
        cplx* dst = out.data() + p * (len + cp);
        std::copy(x.end() - static_cast<std::ptrdiff_t>(cp), x.end(), dst);
        std::copy(x.begin(), x.end(), dst + cp);
    }
}

void GfdmModem::analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const {
    const std::size_t n = static_cast<std::size_t>(cfg_.fft_size);
    const std::size_t kp = static_cast<std::size_t>(cfg_.symbols_per_packet);
    const std::size_t len = kp * n;
    const std::size_t cp = static_cast<std::size_t>(cfg_.cp_len);
    const bool zf = cfg_.gfdm_receiver == GfdmReceiver::ZeroForcing;
    const GfdmBasis* bs = zf ? &basis() : nullptr;
    std::vector<cplx> fold(n), z(n);
    for (std::size_t p = 0; p < out.rows() / kp; ++p) {
        const std::span<const cplx> y = burst.subspan(p * (len + cp) + cp, len);
        for (std::size_t m = 0; m < kp; ++m) {
            if (zf) {
                for (int k = block.first; k <= block.last(); ++k) {
                    const std::size_t c = m * n + static_cast<std::size_t>(k);
                    out(p * kp + m, static_cast<std::size_t>(k)) = kernels::dotu({bs->b.data() + c * len, len}, y);
                }
                continue;
            }
            // Matched filter: A^H y.
            std::fill(fold.begin(), fold.end(), cplx{});
            for (std::size_t q = 0; q < kp; ++q)
                kernels::mac_real(y.subspan(q * n, n), {shifted_[m].data() + q * n, n}, fold);
            dsp::dft(fold, z);
            for (int k = block.first; k <= block.last(); ++k) out(p * kp + m, static_cast<std::size_t>(k)) = z[k];
        }
    }
}

}  // namespace detail
}  // namespace mcwave
