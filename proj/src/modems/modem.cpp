#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "mcwave/kernels.hpp"
#include "waveforms.hpp"

namespace mcwave {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

[[noreturn]] void reject(const std::string& msg) { throw InvalidArgument("WaveformConfig: " + msg); }

}  // namespace

std::string_view kind_name(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::Ofdm: return "ofdm";
        case WaveformKind::Ufmc: return "ufmc";
        case WaveformKind::Fbmc: return "fbmc";
        case WaveformKind::Cfbmc: return "cfbmc";
        case WaveformKind::Gfdm: return "gfdm";
    }
    return "?";
}

WaveformKind parse_kind(std::string_view name) {
    const auto s = lower(name);
    for (auto k : {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Fbmc, WaveformKind::Cfbmc, WaveformKind::Gfdm})
        if (s == kind_name(k)) return k;
    if (s == "c-fbmc") return WaveformKind::Cfbmc;
    throw InvalidArgument("unknown waveform '" + std::string(name) + "' (expected ofdm, ufmc, fbmc, cfbmc, gfdm)");
}

std::string_view receiver_name(GfdmReceiver rx) { return rx == GfdmReceiver::ZeroForcing ? "zf" : "mf"; }

GfdmReceiver parse_receiver(std::string_view name) {
    const auto s = lower(name);
    if (s == "zf") return GfdmReceiver::ZeroForcing;
    if (s == "mf") return GfdmReceiver::MatchedFilter;
    throw InvalidArgument("unknown GFDM receiver '" + std::string(name) + "' (expected zf, mf)");
}

int WaveformConfig::row_granularity() const {
    return (kind == WaveformKind::Gfdm || kind == WaveformKind::Cfbmc) ? symbols_per_packet : 1;
}

void WaveformConfig::validate() const {
    if (fft_size < 8 || !is_pow2(fft_size)) reject("fft_size must be a power of two >= 8");
    if (cp_len < 0 || cp_len >= fft_size) reject("cp_len must lie in [0, fft_size)");
    switch (kind) {
        case WaveformKind::Ofdm: break;
        case WaveformKind::Ufmc: {
            if (!subband_filter) reject("UFMC requires subband_filter");
            const auto len = static_cast<int>(subband_filter->taps.size());
            if (len < 1 || len - 1 > fft_size) reject("UFMC subband_filter length must lie in [1, fft_size + 1]");
            if (subbands.empty() && ufmc_subband_size < 1) reject("ufmc_subband_size must be positive");
            std::vector<SubcarrierBlock> sorted = subbands;
            std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.first < b.first; });
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (sorted[i].count < 1 || sorted[i].first < 0 || sorted[i].last() >= fft_size)
                    reject("UFMC subband outside [0, fft_size)");
                if (i > 0 && sorted[i].first <= sorted[i - 1].last()) reject("UFMC subbands overlap");
            }
            break;
        }
        case WaveformKind::Fbmc:
            if (!prototype) reject("FBMC requires prototype");
            if (overlap < 1) reject("overlap must be positive");
            if (prototype->taps.size() != static_cast<std::size_t>(overlap) * fft_size)
                reject("FBMC prototype length must equal overlap * fft_size");
            break;
        case WaveformKind::Cfbmc:
        case WaveformKind::Gfdm:
            if (!prototype) reject("GFDM / C-FBMC require prototype");
            if (symbols_per_packet < 1) reject("symbols_per_packet must be positive");
            if (prototype->taps.empty()) reject("prototype has no taps");
            break;
    }
}

WaveformConfig reference_config(WaveformKind kind, int fft_size) {
    WaveformConfig c;
    c.kind = kind;
    c.fft_size = fft_size;
    c.cp_len = fft_size / 8;
    switch (kind) {
        case WaveformKind::Ofdm: break;
        case WaveformKind::Ufmc:
            c.cp_len = 0;
            c.subband_filter = dsp::design_dolph_chebyshev(33, 40.0);
            break;
        case WaveformKind::Fbmc:
            c.cp_len = 0;
            c.overlap = 4;
            c.prototype = dsp::design_phydyas(4, fft_size);
            break;
        case WaveformKind::Cfbmc:
            c.symbols_per_packet = 7;
            c.prototype = dsp::design_phydyas(7, fft_size);
            break;
        case WaveformKind::Gfdm:
            c.symbols_per_packet = 7;
            // Odd length keeps the peak on a sample so the wrapped pulse is
            // symmetric about sample 0.
            c.prototype = dsp::design_rrc(0.4, 7 * fft_size + 1, fft_size);
            break;
    }
    return c;
}

std::vector<double> circularize(const dsp::PrototypeFilter& proto, int length) {
    if (length <= 0) throw InvalidArgument("circularize: length must be positive");
    std::vector<double> g(static_cast<std::size_t>(length), 0.0);
    const long centre = static_cast<long>(proto.taps.size() / 2);
    for (std::size_t i = 0; i < proto.taps.size(); ++i) {
        long idx = (static_cast<long>(i) - centre) % length;
        if (idx < 0) idx += length;
        g[static_cast<std::size_t>(idx)] += proto.taps[i];
    }
    double e = 0.0;
    for (double v : g) e += v * v;
    if (!(e > 0.0)) throw NumericalError("circularize: wrapped prototype has zero energy");
    const double s = 1.0 / std::sqrt(e);
    for (double& v : g) v *= s;
    return g;
}

void Modem::check_rows(std::size_t rows) const {
    const auto gran = static_cast<std::size_t>(cfg_.row_granularity());
    if (rows == 0 || rows % gran != 0)
        throw InvalidArgument("symbol rows must be a positive multiple of " + std::to_string(gran));
}

ComplexBuffer Modem::synthesize(const SymbolGrid& grid) const {
    if (grid.cols() != static_cast<std::size_t>(cfg_.fft_size))
        throw InvalidArgument("grid has " + std::to_string(grid.cols()) + " columns, expected fft_size");
    check_rows(grid.rows());
    ComplexBuffer out(burst_length(grid.rows()));
    if (cfg_.zero_first_symbol && cfg_.row_granularity() > 1) {
        SymbolGrid g = grid;
        for (std::size_t m = 0; m < g.rows(); m += cfg_.row_granularity())
            std::fill(g.row(m).begin(), g.row(m).end(), cplx{});
        synthesize_into(g, out.samples);
    } else {
        synthesize_into(grid, out.samples);
    }
    return out;
}

Modulated Modem::modulate(const SymbolGrid& grid) const {
    Modulated out{synthesize(grid), 1.0};
    const double p = out.burst.power();
    if (p > 0.0) {
        out.gain = 1.0 / std::sqrt(p);
        for (auto& s : out.burst.samples) s *= out.gain;
    }
    return out;
}

SymbolGrid Modem::demodulate(const ComplexBuffer& burst, std::size_t rows, double gain,
                             std::optional<SubcarrierBlock> block) const {
    check_rows(rows);
    if (burst.size() != burst_length(rows))
        throw InvalidArgument("burst has " + std::to_string(burst.size()) + " samples, expected " +
                              std::to_string(burst_length(rows)));
    if (!(gain > 0.0) || !std::isfinite(gain)) throw InvalidArgument("demodulate: gain must be positive");
    const SubcarrierBlock b = block.value_or(SubcarrierBlock{0, cfg_.fft_size});
    if (b.first < 0 || b.count < 1 || b.last() >= cfg_.fft_size) throw InvalidArgument("demodulate: block outside band");
    SymbolGrid out(rows, static_cast<std::size_t>(cfg_.fft_size));
    analyze_into(burst.view(), out, b);
    const double inv = 1.0 / gain;
    for (std::size_t m = 0; m < rows; ++m)
        for (int k = b.first; k <= b.last(); ++k) out(m, static_cast<std::size_t>(k)) *= inv;
    return out;
}

std::unique_ptr<Modem> make_modem(const WaveformConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case WaveformKind::Ofdm: return std::make_unique<detail::OfdmModem>(cfg);
        case WaveformKind::Ufmc: return std::make_unique<detail::UfmcModem>(cfg);
        case WaveformKind::Fbmc: return std::make_unique<detail::FbmcModem>(cfg);
        case WaveformKind::Cfbmc: return std::make_unique<detail::CfbmcModem>(cfg);
        case WaveformKind::Gfdm: return std::make_unique<detail::GfdmModem>(cfg);
    }
    throw InvalidArgument("make_modem: unknown kind");
}

}  // namespace mcwave
