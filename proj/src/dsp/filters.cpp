#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mcwave/dsp.hpp"

namespace mcwave::dsp {
namespace {

constexpr double kPi = std::numbers::pi;

void normalize_energy(std::vector<double>& taps) {
    double e = 0.0;
    for (double t : taps) e += t * t;
    const double s = 1.0 / std::sqrt(e);
    for (double& t : taps) t *= s;
}

double chebyshev_poly(int order, double x) {
    if (std::abs(x) <= 1.0) return std::cos(order * std::acos(x));
    if (x > 1.0) return std::cosh(order * std::acosh(x));
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::cosh(order * std::acosh(-x));
}

// Solves the small dense system J dx = -f in place (partial pivoting).
bool solve_small(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return true;
}

}  // namespace

double PrototypeFilter::energy() const {
    double e = 0.0;
    for (double t : taps) e += t * t;
    return e;
}

PrototypeFilter design_rrc(double rolloff, int num_taps, int samples_per_symbol) {
    if (num_taps <= 0) throw InvalidArgument("design_rrc: num_taps must be positive");
    if (samples_per_symbol <= 0) throw InvalidArgument("design_rrc: samples_per_symbol must be positive");
    if (!(rolloff > 0.0 && rolloff <= 1.0)) throw InvalidArgument("design_rrc: rolloff must lie in (0, 1]");
    if (num_taps < samples_per_symbol) throw InvalidArgument("design_rrc: num_taps < samples_per_symbol");

    const double a = rolloff;
    const double center = 0.5 * (num_taps - 1);
    std::vector<double> h(static_cast<std::size_t>(num_taps));
    for (int i = 0; i < num_taps; ++i) {
        const double t = (i - center) / samples_per_symbol;
        const double x = 4.0 * a * t;
        if (std::abs(t) < 1e-12) {
            h[i] = 1.0 - a + 4.0 * a / kPi;
        } else if (std::abs(std::abs(x) - 1.0) < 1e-9) {
            h[i] = a / std::sqrt(2.0) *
                   ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * a)) + (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * a)));
        } else {
            h[i] = (std::sin(kPi * t * (1.0 - a)) + x * std::cos(kPi * t * (1.0 + a))) / (kPi * t * (1.0 - x * x));
        }
    }
    // Mirror so both halves are bit-identical; the closed form is evaluated
    // at +/-t with different rounding otherwise.
    for (int i = 0; i < num_taps / 2; ++i) h[num_taps - 1 - i] = h[i];
    normalize_energy(h);
    return {std::move(h), RrcDesign{rolloff}, samples_per_symbol};
}

PrototypeFilter design_dolph_chebyshev(int num_taps, double attenuation_db) {
    if (num_taps < 3) throw InvalidArgument("design_dolph_chebyshev: need at least 3 taps");
    if (!(attenuation_db > 0.0)) throw InvalidArgument("design_dolph_chebyshev: attenuation_db must be positive");

    // Spectrum samples are the Chebyshev polynomial T_{M-1}(beta cos(pi k / M));
    // the window is their inverse transform (direct DFT, M is small).
    const int m = num_taps;
    const int order = m - 1;
    const double beta = std::cosh(std::acosh(std::pow(10.0, attenuation_db / 20.0)) / order);
    std::vector<cplx> p(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double v = chebyshev_poly(order, beta * std::cos(kPi * k / m));
        p[k] = (m % 2 == 1) ? cplx(v, 0.0) : v * std::polar(1.0, kPi * k / m);
    }
    std::vector<double> spec(static_cast<std::size_t>(m));
    for (int n = 0; n < m; ++n) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
            const double ang = -2.0 * kPi * static_cast<double>((static_cast<long>(k) * n) % m) / m;
            acc += p[k].real() * std::cos(ang) - p[k].imag() * std::sin(ang);
        }
        spec[n] = acc;
    }
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(m));
    if (m % 2 == 1) {
        const int half = (m + 1) / 2;
        for (int i = half - 1; i >= 1; --i) w.push_back(spec[i]);
        for (int i = 0; i < half; ++i) w.push_back(spec[i]);
    } else {
        const int half = m / 2 + 1;
        for (int i = half - 1; i >= 1; --i) w.push_back(spec[i]);
        for (int i = 1; i < half; ++i) w.push_back(spec[i]);
    }
    for (int i = 0; i < m / 2; ++i) w[m - 1 - i] = w[i];
    const double peak = *std::max_element(w.begin(), w.end());
    for (double& v : w) v /= peak;
    return {std::move(w), DolphChebyshevDesign{attenuation_db}, 1};
}

std::vector<double> phydyas_coefficients(int overlap) {
    if (overlap < 2 || overlap > 8)
        throw InvalidArgument("phydyas_coefficients: overlap must lie in [2, 8], got " + std::to_string(overlap));
    const int K = overlap;
    const int pairs = (K - 1) / 2;

    auto coeffs = [&](const std::vector<double>& theta) {
        std::vector<double> h(static_cast<std::size_t>(K), 0.0);
        h[0] = 1.0;
        for (int i = 0; i < pairs; ++i) {
            h[i + 1] = std::cos(theta[i]);
            h[K - 1 - i] = std::sin(theta[i]);
        }
        if (K % 2 == 0) h[K / 2] = std::sqrt(0.5);
        return h;
    };
    // Row 0: g(0) = H_0 + 2 sum (-1)^k H_k. Row d: sum (-1)^k H_k (k/K)^(2d).
    auto weight = [&](int d, int k) { return d == 0 ? 2.0 : std::pow(static_cast<double>(k) / K, 2.0 * d); };
    auto residual = [&](const std::vector<double>& theta) {
        const auto h = coeffs(theta);
        std::vector<double> f(static_cast<std::size_t>(pairs), 0.0);
        for (int d = 0; d < pairs; ++d) {
            double s = d == 0 ? h[0] : 0.0;
            for (int k = 1; k < K; ++k) s += (k % 2 ? -1.0 : 1.0) * weight(d, k) * h[k];
            f[d] = s;
        }
        return f;
    };
    auto norm_inf = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    std::vector<double> theta(static_cast<std::size_t>(pairs));
    for (int i = 0; i < pairs; ++i) theta[i] = 0.25 * kPi * std::pow(2.0 * (i + 1) / K, 3.0);

    auto f = residual(theta);
    for (int iter = 0; iter < 200 && norm_inf(f) > 1e-15; ++iter) {
        std::vector<std::vector<double>> jac(static_cast<std::size_t>(pairs), std::vector<double>(pairs, 0.0));
        for (int d = 0; d < pairs; ++d) {
            for (int i = 0; i < pairs; ++i) {
                const int lo = i + 1, hi = K - 1 - i;
                jac[d][i] = (lo % 2 ? -1.0 : 1.0) * weight(d, lo) * -std::sin(theta[i]) +
                            (hi % 2 ? -1.0 : 1.0) * weight(d, hi) * std::cos(theta[i]);
            }
        }
        std::vector<double> neg(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
        std::vector<double> step;
        if (!solve_small(jac, neg, step)) break;
        double lambda = 1.0;
        const double current = norm_inf(f);
        std::vector<double> trial(theta.size());
        for (; lambda > 1e-6; lambda *= 0.5) {
            for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + lambda * step[i];
            if (norm_inf(residual(trial)) < current) break;
        }
        if (lambda <= 1e-6) break;
        theta = trial;
        f = residual(theta);
    }
    if (norm_inf(f) > 1e-12)
        throw NumericalError("phydyas_coefficients: design equations did not converge for overlap " +
                             std::to_string(K));
    return coeffs(theta);
}

PrototypeFilter design_phydyas(int overlap, int samples_per_symbol) {
    if (samples_per_symbol < 2) throw InvalidArgument("design_phydyas: samples_per_symbol must be >= 2");
    auto h = phydyas_coefficients(overlap);
    const int len = overlap * samples_per_symbol;
    std::vector<double> g(static_cast<std::size_t>(len));
    for (int n = 0; n < len; ++n) {
        double v = h[0];
        for (int k = 1; k < overlap; ++k)
            v += 2.0 * (k % 2 ? -1.0 : 1.0) * h[k] * std::cos(2.0 * kPi * k * n / len);
        g[n] = v;
    }
    for (int n = 1; n < len / 2; ++n) g[len - n] = g[n];
    normalize_energy(g);
    return {std::move(g), PhydyasDesign{overlap, std::move(h)}, samples_per_symbol};
}

}  // namespace mcwave::dsp
