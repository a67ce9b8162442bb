#include "mcwave/kernels.hpp"

namespace mcwave::kernels {
namespace {

// std::complex operator* goes through the Annex G NaN recovery path; the
// kernels spell the arithmetic out instead.

cplx dotu_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
    }
}

void mul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

void mul_real_scalar(const cplx* x, const double* w, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = {x[i].real() * w[i], x[i].imag() * w[i]};
}

void mac_real_scalar(const cplx* x, const double* w, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = {y[i].real() + x[i].real() * w[i], y[i].imag() + x[i].imag() * w[i]};
}

double energy_scalar(const cplx* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{SimdLevel::Scalar, dotu_scalar,     dotc_scalar,     axpy_scalar,
                                   mul_scalar,        mul_real_scalar, mac_real_scalar, energy_scalar};
    return table;
}

}  // namespace mcwave::kernels
