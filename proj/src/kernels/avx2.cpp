// Compiled with -mavx2 -mfma. Nothing in here may run before dispatch has
// confirmed CPU support.

#include <immintrin.h>

#include "mcwave/kernels.hpp"

namespace mcwave::kernels {
namespace {

// Two complex doubles per register: [re0, im0, re1, im1].

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// [w0, w0, w1, w1]
inline __m256d load_real_pair(const double* w) {
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w)), 0x50);
}

inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d ar = _mm256_movedup_pd(a);
    const __m256d ai = _mm256_permute_pd(a, 0xF);
    const __m256d bs = _mm256_permute_pd(b, 0x5);
    return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// Sum of the two complex lanes.
inline cplx hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

cplx dotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
    // acc_r = sum ar * [br, bi], acc_i = sum ai * [bi, br]
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i);
        const __m256d vb = load2(b + i);
        acc_r = _mm256_fmadd_pd(_mm256_movedup_pd(va), vb, acc_r);
        acc_i = _mm256_fmadd_pd(_mm256_permute_pd(va, 0xF), _mm256_permute_pd(vb, 0x5), acc_i);
    }
    cplx s = hsum(_mm256_addsub_pd(acc_r, acc_i));
    for (; i < n; ++i) {
        s += cplx(a[i].real() * b[i].real() - a[i].imag() * b[i].imag(),
                  a[i].real() * b[i].imag() + a[i].imag() * b[i].real());
    }
    return s;
}

cplx dotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i);
        const __m256d vb = load2(b + i);
        acc_r = _mm256_fmadd_pd(_mm256_movedup_pd(va), vb, acc_r);
        acc_i = _mm256_fmadd_pd(_mm256_permute_pd(va, 0xF), _mm256_permute_pd(vb, 0x5), acc_i);
    }
    // conj(a) b = [ar br + ai bi, ar bi - ai br]
    const __m256d neg = _mm256_sub_pd(_mm256_setzero_pd(), acc_i);
    cplx s = hsum(_mm256_addsub_pd(acc_r, neg));
    for (; i < n; ++i) {
        s += cplx(a[i].real() * b[i].real() + a[i].imag() * b[i].imag(),
                  a[i].real() * b[i].imag() - a[i].imag() * b[i].real());
    }
    return s;
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = load2(x + i);
        const __m256d prod = _mm256_fmaddsub_pd(ar, vx, _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0x5)));
        store2(y + i, _mm256_add_pd(load2(y + i), prod));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + alpha.real() * xr - alpha.imag() * xi,
                y[i].imag() + alpha.real() * xi + alpha.imag() * xr};
    }
}

void mul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) store2(out + i, cmul(load2(a + i), load2(b + i)));
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

void mul_real_avx2(const cplx* x, const double* w, cplx* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) store2(out + i, _mm256_mul_pd(load2(x + i), load_real_pair(w + i)));
    for (; i < n; ++i) out[i] = {x[i].real() * w[i], x[i].imag() * w[i]};
}

void mac_real_avx2(const cplx* x, const double* w, cplx* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        store2(y + i, _mm256_fmadd_pd(load2(x + i), load_real_pair(w + i), load2(y + i)));
    for (; i < n; ++i)
        y[i] = {y[i].real() + x[i].real() * w[i], y[i].imag() + x[i].imag() * w[i]};
}

double energy_avx2(const cplx* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load2(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    const cplx s = hsum(acc);
    double total = s.real() + s.imag();
    for (; i < n; ++i) total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return total;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{SimdLevel::Avx2, dotu_avx2,     dotc_avx2,     axpy_avx2,
                                   mul_avx2,        mul_real_avx2, mac_real_avx2, energy_avx2};
    return &table;
}

}  // namespace mcwave::kernels
