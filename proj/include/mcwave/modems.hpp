#pragma once

// The five multicarrier waveforms behind one modulate/demodulate interface.

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "mcwave/dsp.hpp"
#include "mcwave/types.hpp"

namespace mcwave {

enum class WaveformKind { Ofdm, Ufmc, Fbmc, Cfbmc, Gfdm };
enum class GfdmReceiver { ZeroForcing, MatchedFilter };

std::string_view kind_name(WaveformKind kind);
/// Accepts "ofdm", "ufmc", "fbmc", "cfbmc", "gfdm" (case-insensitive).
WaveformKind parse_kind(std::string_view name);
std::string_view receiver_name(GfdmReceiver rx);
GfdmReceiver parse_receiver(std::string_view name);

struct WaveformConfig {
    WaveformKind kind = WaveformKind::Ofdm;
    int fft_size = 256;
    /// OFDM: per symbol. GFDM / C-FBMC: per packet. Ignored otherwise.
    int cp_len = 32;

    /// UFMC subband filter (Dolph-Chebyshev in the reference setup).
    std::optional<dsp::PrototypeFilter> subband_filter;
    /// UFMC subbands. Empty means the whole band cut into runs of
    /// ufmc_subband_size starting at subcarrier 0.
    std::vector<SubcarrierBlock> subbands;
    int ufmc_subband_size = 12;

    /// FBMC: linear prototype of length overlap * N.
    /// C-FBMC / GFDM: linear prototype, circularized onto K * N samples.
    std::optional<dsp::PrototypeFilter> prototype;
    int symbols_per_packet = 7;
    int overlap = 4;
    GfdmReceiver gfdm_receiver = GfdmReceiver::ZeroForcing;
    /// GFDM / C-FBMC: force symbol row 0 of every packet to zero.
    bool zero_first_symbol = false;

    /// Throws InvalidArgument naming the violated constraint.
    void validate() const;
    /// Multicarrier symbols per burst must be a multiple of this.
    int row_granularity() const;
};

/// Reference parameters: N = 256, CP 32, Dolph-Chebyshev 33 taps / 40 dB,
/// PHYDYAS overlap 4 (FBMC) and 7 (C-FBMC), RRC alpha = 0.4 with K = 7.
WaveformConfig reference_config(WaveformKind kind, int fft_size = 256);

/// Wraps a linear prototype onto `length` samples by summing aliases, with the
/// centre tap (index taps.size() / 2) landing on sample 0. Unit energy.
std::vector<double> circularize(const dsp::PrototypeFilter& proto, int length);

struct Modulated {
    ComplexBuffer burst;
    /// Scale applied to reach unit average power; demodulate divides it out.
    double gain = 1.0;
};

class Modem {
public:
    virtual ~Modem() = default;

    const WaveformConfig& config() const { return cfg_; }

    /// Samples in a burst carrying `rows` multicarrier symbols.
    virtual std::size_t burst_length(std::size_t rows) const = 0;

    /// Grid is rows x fft_size. Output has unit average power (an all-zero
    /// grid yields an all-zero burst with gain 1).
    Modulated modulate(const SymbolGrid& grid) const;

    /// Unnormalized synthesis: the burst before the unit-power scaling.
    ComplexBuffer synthesize(const SymbolGrid& grid) const;

    /// `burst` must hold exactly burst_length(rows) samples. When `block` is
    /// given only those columns are guaranteed to be computed; the rest may
    /// be left at zero.
    SymbolGrid demodulate(const ComplexBuffer& burst, std::size_t rows, double gain,
                          std::optional<SubcarrierBlock> block = std::nullopt) const;

protected:
    explicit Modem(WaveformConfig cfg) : cfg_(std::move(cfg)) {}

    virtual void synthesize_into(const SymbolGrid& grid, std::vector<cplx>& out) const = 0;
    virtual void analyze_into(std::span<const cplx> burst, SymbolGrid& out, SubcarrierBlock block) const = 0;

    void check_rows(std::size_t rows) const;

    WaveformConfig cfg_;
};

std::unique_ptr<Modem> make_modem(const WaveformConfig& cfg);

// ---------------------------------------------------------------- GFDM basis

/// Explicit K*N x K*N GFDM (or C-FBMC) transmit matrix and its ZF inverse.
struct GfdmBasis {
    int fft_size = 0;
    int symbols = 0;
    /// Circularized prototype, peak at sample 0.
    std::vector<double> pulse;
    /// Row-major, size (K*N)^2. a[n * KN + (m*N + k)].
    std::vector<cplx> a;
    /// Row-major inverse, b[(m*N + k) * KN + n].
    std::vector<cplx> b;
    /// 1-norm condition number estimate of A.
    double condition = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(fft_size) * symbols; }
};

/// Built once per distinct (N, K, prototype) and shared. Throws
/// NumericalError when A is singular or its condition number exceeds 1e12.
std::shared_ptr<const GfdmBasis> gfdm_build_matrix(const WaveformConfig& cfg);

/// Amplitude spectrum, on the K*N-bin grid, of the receive filter for
/// subcarrier k0: circular matched filter for C-FBMC (and GFDM-MF), the
/// matching row of A^-1 for GFDM-ZF.
std::vector<double> rx_filter_spectrum(const WaveformConfig& cfg, int k0);

/// Window shape for leakage_of_windowed_tone; nullopt is rectangular.
struct LeakageWindow {
    std::optional<dsp::PrototypeFilter> window;
};

/// Leakage of one subcarrier into the receiver's DFT bins under a timing
/// misalignment. A tone at `tone_bin`, shaped by the window, is delayed by
/// tau samples and correlated against the window-shaped basis of every bin:
///   P[b] = |sum_n w[n] w[n-tau] e^{j2pi k(n-tau)/N} e^{-j2pi bn/N}|^2 / (sum w^2)^2
/// Rectangular windows span fft_size samples. Length fft_size.
std::vector<double> leakage_of_windowed_tone(const LeakageWindow& w, int fft_size, int tone_bin, int tau_samples);

}  // namespace mcwave
