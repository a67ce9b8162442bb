#pragma once

// Signal-level building blocks shared by every waveform: FFT, prototype
// filter designs, 16-QAM mapping, TO/CFO impairments and AWGN.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mcwave/types.hpp"

namespace mcwave::dsp {

// ---------------------------------------------------------------- FFT

/// Unnormalized DFT of any length, forward uses exp(-j2pi kn/n).
/// `in` and `out` may alias. Plans are cached per length and shared between
/// threads.
void dft(std::span<const cplx> in, std::span<cplx> out);
void idft(std::span<const cplx> in, std::span<cplx> out);

// ---------------------------------------------------------------- filters

struct RrcDesign {
    double rolloff;
    bool operator==(const RrcDesign&) const = default;
};
struct DolphChebyshevDesign {
    double attenuation_db;
    bool operator==(const DolphChebyshevDesign&) const = default;
};
struct PhydyasDesign {
    int overlap;
    /// H_0 .. H_{overlap-1}
    std::vector<double> coefficients;
    bool operator==(const PhydyasDesign&) const = default;
};

using FilterDesign = std::variant<RrcDesign, DolphChebyshevDesign, PhydyasDesign>;

struct PrototypeFilter {
    std::vector<double> taps;
    FilterDesign design;
    int samples_per_symbol = 1;

    double energy() const;
    bool operator==(const PrototypeFilter&) const = default;
};

/// Root-raised-cosine impulse response, `num_taps` samples symmetric about
/// the peak, unit energy.
PrototypeFilter design_rrc(double rolloff, int num_taps, int samples_per_symbol);

/// Dolph-Chebyshev window with equiripple sidelobes `attenuation_db` below
/// the main lobe, scaled to a peak tap of 1.
PrototypeFilter design_dolph_chebyshev(int num_taps, double attenuation_db);

/// Frequency-sampling coefficients H_0..H_{K-1} for overlap factor K.
///
/// H_0 = 1, H_k^2 + H_{K-k}^2 = 1, and the remaining freedom is used to make
/// the time response vanish at the window edge together with its even
/// derivatives up to order 2*floor((K-1)/2)-2 (maximally smooth tails). For
/// K = 3 and 4 this lands on the tabulated PHYDYAS values.
std::vector<double> phydyas_coefficients(int overlap);

/// Frequency-sampling (Mirabbasi-Martin / PHYDYAS) prototype of length
/// overlap * samples_per_symbol, peak at the middle sample, unit energy.
PrototypeFilter design_phydyas(int overlap, int samples_per_symbol);

// ---------------------------------------------------------------- 16-QAM

/// Gray 16-QAM. Bits are consumed four at a time: b0 b1 select the in-phase
/// level, b2 b3 the quadrature level, each through the rail table
/// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).
std::vector<cplx> map_qam16(std::span<const std::uint8_t> bits);

/// Nearest-neighbour hard decision, inverse of map_qam16.
std::vector<std::uint8_t> demap_qam16(std::span<const cplx> symbols);

/// The 16 constellation points indexed by the 4-bit label b0b1b2b3 (b0 MSB).
std::vector<cplx> qam16_constellation();

// ---------------------------------------------------------------- impairments

/// y[n] = x[n] * exp(j 2 pi epsilon (n + origin) / fft_size).
ComplexBuffer apply_cfo(const ComplexBuffer& x, double epsilon, int fft_size);

struct TimingShift {
    ComplexBuffer buffer;
    /// Set when the advance consumed the whole burst; `buffer` is then empty.
    bool fully_advanced = false;
};

/// Positive tau prepends tau zeros (delay). Negative tau drops the first
/// |tau| samples (advance). The origin is left unchanged, so the content moves
/// by tau absolute positions.
TimingShift apply_timing_offset(const ComplexBuffer& x, int tau_samples);

/// Adds circularly-symmetric complex Gaussian noise of total variance
/// `noise_variance` (half per rail), generated from `seed`.
ComplexBuffer add_awgn(const ComplexBuffer& x, double noise_variance, std::uint64_t seed);

/// Adds `x` into `window` at absolute index positions, discarding samples
/// that fall outside [window.origin, window.origin + window.size()).
void accumulate(ComplexBuffer& window, const ComplexBuffer& x, double scale = 1.0);

}  // namespace mcwave::dsp
