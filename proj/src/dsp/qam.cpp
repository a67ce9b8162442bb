#include <cmath>

#include "mcwave/dsp.hpp"

namespace mcwave::dsp {
namespace {

const double kScale = 1.0 / std::sqrt(10.0);

double rail_level(std::uint8_t hi, std::uint8_t lo) {
    // Gray rail: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    if (hi == 0) return lo == 0 ? -3.0 : -1.0;
    return lo == 0 ? 3.0 : 1.0;
}

void rail_bits(double v, std::uint8_t* out) {
    const double x = v / kScale;
    out[0] = x > 0.0 ? 1 : 0;
    out[1] = std::abs(x) < 2.0 ? 1 : 0;
}

}  // namespace

std::vector<cplx> map_qam16(std::span<const std::uint8_t> bits) {
    if (bits.size() % 4 != 0) throw InvalidArgument("map_qam16: bit count must be a multiple of 4");
    std::vector<cplx> out(bits.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint8_t* b = bits.data() + 4 * i;
        for (int j = 0; j < 4; ++j)
            if (b[j] > 1) throw InvalidArgument("map_qam16: bits must be 0 or 1");
        out[i] = cplx(rail_level(b[0], b[1]), rail_level(b[2], b[3])) * kScale;
    }
    return out;
}

std::vector<std::uint8_t> demap_qam16(std::span<const cplx> symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * 4);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        rail_bits(symbols[i].real(), bits.data() + 4 * i);
        rail_bits(symbols[i].imag(), bits.data() + 4 * i + 2);
    }
    return bits;
}

std::vector<cplx> qam16_constellation() {
    std::vector<std::uint8_t> bits(64);
    for (int label = 0; label < 16; ++label)
        for (int j = 0; j < 4; ++j) bits[4 * label + j] = (label >> (3 - j)) & 1;
    return map_qam16(bits);
}

}  // namespace mcwave::dsp
