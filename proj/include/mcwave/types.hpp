#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcwave {

using cplx = std::complex<double>;

/// Raised when an operation is called with arguments outside its contract.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical construction (matrix inverse, filter design) fails.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Contiguous complex baseband samples.
///
/// `origin` is the absolute sample index of `samples[0]`. CFO rotation uses it so
/// that a burst cut into pieces keeps a continuous phase.
struct ComplexBuffer {
    std::vector<cplx> samples;
    std::int64_t origin = 0;

    ComplexBuffer() = default;
    explicit ComplexBuffer(std::vector<cplx> s, std::int64_t org = 0)
        : samples(std::move(s)), origin(org) {}
    explicit ComplexBuffer(std::size_t n, std::int64_t org = 0) : samples(n), origin(org) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    std::span<const cplx> view() const { return samples; }
    std::span<cplx> view() { return samples; }

    /// Mean of squared magnitudes; 0 for an empty buffer.
    double power() const;
    double energy() const;
    bool all_finite() const;
};

/// Dense rows x cols complex array, row-major. Row index is the symbol time m,
/// column index the subcarrier k.
class SymbolGrid {
public:
    SymbolGrid() = default;
    SymbolGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t m, std::size_t k) { return data_[m * cols_ + k]; }
    const cplx& operator()(std::size_t m, std::size_t k) const { return data_[m * cols_ + k]; }

    std::span<cplx> row(std::size_t m) { return {data_.data() + m * cols_, cols_}; }
    std::span<const cplx> row(std::size_t m) const { return {data_.data() + m * cols_, cols_}; }

    std::span<cplx> flat() { return data_; }
    std::span<const cplx> flat() const { return data_; }

    /// Columns [first, first + count) as a new grid.
    SymbolGrid columns(std::size_t first, std::size_t count) const;

    bool operator==(const SymbolGrid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Largest elementwise |a - b|; grids must have equal shape.
double max_abs_diff(const SymbolGrid& a, const SymbolGrid& b);

/// Contiguous run of subcarrier indices [first, first + count).
struct SubcarrierBlock {
    int first = 0;
    int count = 0;

    int last() const { return first + count - 1; }
    bool contains(int k) const { return k >= first && k < first + count; }
    bool operator==(const SubcarrierBlock&) const = default;
};

double to_db(double power);

}  // namespace mcwave
