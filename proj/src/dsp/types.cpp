#include <algorithm>
#include <cmath>

#include "mcwave/kernels.hpp"
#include "mcwave/types.hpp"

namespace mcwave {

double ComplexBuffer::energy() const { return kernels::energy(samples); }

double ComplexBuffer::power() const {
    return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size());
}

bool ComplexBuffer::all_finite() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

SymbolGrid SymbolGrid::columns(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw InvalidArgument("column range exceeds grid width");
    SymbolGrid out(rows_, count);
    for (std::size_t m = 0; m < rows_; ++m)
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(m * cols_ + first), count,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(m * count));
    return out;
}

double max_abs_diff(const SymbolGrid& a, const SymbolGrid& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("grid shape mismatch");
    double worst = 0.0;
    const auto fa = a.flat();
    const auto fb = b.flat();
    for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
    return worst;
}

double to_db(double power) { return 10.0 * std::log10(std::max(power, 1e-300)); }

}  // namespace mcwave
