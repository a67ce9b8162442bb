#pragma once

// Data-parallel inner loops. Every routine has a scalar reference
// implementation; an AVX2/FMA variant is compiled into its own translation
// unit and picked at runtime when the CPU supports it.

#include <cstddef>
#include <span>
#include <string_view>

#include "mcwave/types.hpp"

namespace mcwave::kernels {

enum class SimdLevel { Scalar, Avx2 };

struct KernelTable {
    SimdLevel level;
    // sum a[i] * b[i]
    cplx (*dotu)(const cplx* a, const cplx* b, std::size_t n);
    // sum conj(a[i]) * b[i]
    cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
    // out[i] = a[i] * b[i]; out may alias a or b
    void (*mul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = x[i] * w[i]; out may alias x
    void (*mul_real)(const cplx* x, const double* w, cplx* out, std::size_t n);
    // y[i] += x[i] * w[i]
    void (*mac_real)(const cplx* x, const double* w, cplx* y, std::size_t n);
    // sum |x[i]|^2
    double (*energy)(const cplx* x, std::size_t n);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the variant was not compiled for this target.
const KernelTable* avx2_table();

/// True when the running CPU can execute the AVX2/FMA variant.
bool cpu_has_avx2();

/// Table in use. Chosen once: the best supported level, unless the
/// environment variable MCWAVE_SIMD is set to "scalar".
const KernelTable& active();

/// Override the active table (tests and benchmarking). Throws InvalidArgument
/// if the level is unavailable on this machine.
void force_level(SimdLevel level);

std::string_view level_name(SimdLevel level);

inline cplx dotu(std::span<const cplx> a, std::span<const cplx> b) {
    return active().dotu(a.data(), b.data(), a.size());
}
inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
    return active().dotc(a.data(), b.data(), a.size());
}
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void mul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    active().mul(a.data(), b.data(), out.data(), a.size());
}
inline void mul_real(std::span<const cplx> x, std::span<const double> w, std::span<cplx> out) {
    active().mul_real(x.data(), w.data(), out.data(), x.size());
}
inline void mac_real(std::span<const cplx> x, std::span<const double> w, std::span<cplx> y) {
    active().mac_real(x.data(), w.data(), y.data(), x.size());
}
inline double energy(std::span<const cplx> x) { return active().energy(x.data(), x.size()); }

}  // namespace mcwave::kernels
