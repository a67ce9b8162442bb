#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mcwave/dsp.hpp"
#include "mcwave/kernels.hpp"

namespace mcwave::dsp {

ComplexBuffer apply_cfo(const ComplexBuffer& x, double epsilon, int fft_size) {
    if (fft_size <= 0) throw InvalidArgument("apply_cfo: fft_size must be positive");
    if (!std::isfinite(epsilon)) throw InvalidArgument("apply_cfo: epsilon must be finite");
    ComplexBuffer y(x.size(), x.origin);
    if (x.empty()) return y;
    std::vector<cplx> rot(x.size());
    const double step = epsilon / fft_size;
    for (std::size_t n = 0; n < x.size(); ++n) {
        // Reduce to a fraction of a turn before scaling by 2 pi so long bursts
        // keep full phase precision.
        double t = step * static_cast<double>(static_cast<std::int64_t>(n) + x.origin);
        t -= std::floor(t);
        rot[n] = std::polar(1.0, 2.0 * std::numbers::pi * t);
    }
    kernels::mul(x.view(), rot, y.view());
    return y;
}

TimingShift apply_timing_offset(const ComplexBuffer& x, int tau_samples) {
    TimingShift out;
    out.buffer.origin = x.origin;
    if (tau_samples >= 0) {
        out.buffer.samples.assign(static_cast<std::size_t>(tau_samples), cplx{});
        out.buffer.samples.insert(out.buffer.samples.end(), x.samples.begin(), x.samples.end());
        return out;
    }
    const std::size_t drop = static_cast<std::size_t>(-static_cast<std::int64_t>(tau_samples));
    if (drop >= x.size()) {
        out.fully_advanced = true;
        return out;
    }
    out.buffer.samples.assign(x.samples.begin() + static_cast<std::ptrdiff_t>(drop), x.samples.end());
    return out;
}

ComplexBuffer add_awgn(const ComplexBuffer& x, double noise_variance, std::uint64_t seed) {
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw InvalidArgument("add_awgn: noise_variance must be finite and non-negative");
    ComplexBuffer y = x;
    if (noise_variance == 0.0) return y;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, std::sqrt(noise_variance / 2.0));
    for (auto& s : y.samples) {
        const double re = dist(rng);
        const double im = dist(rng);
        s += cplx(re, im);
    }
    return y;
}

void accumulate(ComplexBuffer& window, const ComplexBuffer& x, double scale) {
    const std::int64_t w0 = window.origin;
    const std::int64_t w1 = w0 + static_cast<std::int64_t>(window.size());
    const std::int64_t x0 = x.origin;
    const std::int64_t x1 = x0 + static_cast<std::int64_t>(x.size());
    const std::int64_t lo = std::max(w0, x0);
    const std::int64_t hi = std::min(w1, x1);
    if (hi <= lo) return;
    const auto n = static_cast<std::size_t>(hi - lo);
    kernels::axpy(cplx(scale, 0.0), {x.samples.data() + (lo - x0), n}, {window.samples.data() + (lo - w0), n});
}

}  // namespace mcwave::dsp
