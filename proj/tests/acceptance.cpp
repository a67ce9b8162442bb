// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.
//
// Monte Carlo trial counts are reduced from the preset defaults so the run
// fits a single core; every count is printed next to its result.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcwave/experiment.hpp"
#include "mcwave/kernels.hpp"

using namespace mcwave;

namespace {

constexpr double kFloorDb = -200.0;

const std::vector<WaveformKind> kAll = {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Fbmc,
                                        WaveformKind::Cfbmc, WaveformKind::Gfdm};

int failures = 0;

void report(bool ok, const std::string& id, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string f1(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1f", v);
    return b;
}
std::string g3(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

Scenario two_user(WaveformKind k) { return build_scenario(preset_config("fig3-to-sweep"), k); }

double mai_at(Scenario s, SweepAxis axis, double v, std::size_t trials) {
    return mai_sweep(s, axis, {v}, {trials, 1, 1}).front().value;
}

// "a is not above b": a <= b, or b sits at the machine-precision floor
// (exact orthogonality), where an ordering is a tie rather than a violation.
bool not_above(double a, double b, bool floor_ties) { return a <= b || (floor_ties && b < kFloorDb); }

// ---------------------------------------------------------------- criteria

void round_trip() {
    bool ok = true;
    std::ostringstream d;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int n : {256, 64}) {
        for (auto k : kAll) {
            auto cfg = reference_config(k, n);
            auto m = make_modem(cfg);
            const std::size_t rows = 7;
            SymbolGrid g(rows, static_cast<std::size_t>(n));
            for (auto& v : g.flat()) v = {nd(rng), nd(rng)};
            const auto tx = m->modulate(g);
            const auto rx = m->demodulate(tx.burst, rows, tx.gain);
            if (k == WaveformKind::Fbmc || k == WaveformKind::Cfbmc) {
                double err = 0, sig = 0;
                for (std::size_t i = 0; i < g.flat().size(); ++i) {
                    err += std::norm(rx.flat()[i] - g.flat()[i]);
                    sig += std::norm(g.flat()[i]);
                }
                const double db = 10 * std::log10(err / sig);
                ok = ok && db < -55.0;
                d << kind_name(k) << "@" << n << " " << f1(db) << " dB; ";
            } else {
                const double e = max_abs_diff(rx, g);
                ok = ok && e < 1e-8;
                d << kind_name(k) << "@" << n << " " << g3(e) << "; ";
            }
        }
    }
    report(ok, "round-trip", d.str() + "(max error < 1e-8, or residual < -55 dB for FBMC/C-FBMC)");
}

void cp_absorption() {
    const std::size_t trials = 4;
    auto sweep = [&](WaveformKind k) {
        std::vector<double> out;
        for (int tau = 0; tau <= 32; ++tau) out.push_back(mai_at(two_user(k), SweepAxis::TimingOffset, tau / 256.0, trials));
        return out;
    };
    const auto ofdm = sweep(WaveformKind::Ofdm);
    const auto cfbmc = sweep(WaveformKind::Cfbmc);
    const auto gfdm = sweep(WaveformKind::Gfdm);
    const double ofdm_in = *std::max_element(ofdm.begin(), ofdm.end());
    const double cfbmc_in = *std::max_element(cfbmc.begin(), cfbmc.end());
    const double beyond = mai_at(two_user(WaveformKind::Ofdm), SweepAxis::TimingOffset, 40 / 256.0, trials);
    const bool ok = ofdm_in < -200 && cfbmc_in < -200 && beyond >= -60 && beyond - ofdm_in >= 140;
    report(ok, "cp-absorption",
           "OFDM max over tau 0..32 = " + f1(ofdm_in) + " dB, tau=40 -> " + f1(beyond) + " dB (rise " +
               f1(beyond - ofdm_in) + " dB); C-FBMC max in zone " + f1(cfbmc_in) + " dB; GFDM in zone (recorded) " +
               f1(*std::min_element(gfdm.begin(), gfdm.end())) + ".." + f1(*std::max_element(gfdm.begin(), gfdm.end())) +
               " dB; " + std::to_string(trials) + " trials");
}

void ufmc_range() {
    const std::size_t trials = 40;
    const auto s = two_user(WaveformKind::Ufmc);
    const double at0 = mai_at(s, SweepAxis::TimingOffset, 0.0, trials);
    double worst = -1e9;
    std::ostringstream d;
    for (int tau = -2; tau <= 2; ++tau) {
        if (tau == 0) continue;
        const double v = mai_at(s, SweepAxis::TimingOffset, tau / 256.0, trials);
        worst = std::max(worst, std::abs(v - at0));
        d << tau << ":" << f1(v) << " ";
    }
    const double p = mai_at(s, SweepAxis::TimingOffset, 26 / 256.0, trials);
    const double m = mai_at(s, SweepAxis::TimingOffset, -26 / 256.0, trials);
    const bool ok = worst <= 3.0 && p - at0 >= 20.0 && m - at0 >= 20.0;
    report(ok, "ufmc-to-range",
           "tau=0 " + f1(at0) + " dB; |tau|<=2 samples: " + d.str() + "(max dev " + f1(worst) + " dB); tau=+-26: " +
               f1(p) + ", " + f1(m) + " dB; " + std::to_string(trials) + " trials");
}

void fbmc_flat() {
    const std::size_t trials = 30;
    std::map<WaveformKind, std::vector<double>> curves;
    std::vector<double> taus;
    for (int i = 0; i <= 16; ++i) taus.push_back(i / 32.0);
    for (auto k : kAll) {
        for (const auto& r : mai_sweep(two_user(k), SweepAxis::TimingOffset, taus, {trials, 1, 1}))
            curves[k].push_back(r.value);
    }
    const auto& fb = curves[WaveformKind::Fbmc];
    const double spread = *std::max_element(fb.begin(), fb.end()) - *std::min_element(fb.begin(), fb.end());
    int strict = 0, tied = 0;
    for (std::size_t i = 0; i < taus.size(); ++i)
        for (auto k : kAll) {
            if (k == WaveformKind::Fbmc) continue;
            strict += !not_above(fb[i], curves[k][i], false);
            tied += !not_above(fb[i], curves[k][i], true);
        }
    const bool ok = spread <= 3.0 && tied == 0;
    report(ok, "fbmc-to-flat",
           "FBMC spread over tau in [0, 0.5]N = " + f1(spread) + " dB (" + f1(*std::min_element(fb.begin(), fb.end())) +
               ".." + f1(*std::max_element(fb.begin(), fb.end())) + "); points where another waveform is lower: " +
               std::to_string(strict) + " strict, " + std::to_string(tied) + " after floor ties; 17 points, " +
               std::to_string(trials) + " trials");
}

void cfo_nulls() {
    const std::size_t trials = 20;
    const auto cf = two_user(WaveformKind::Cfbmc);
    const auto gf = two_user(WaveformKind::Gfdm);
    bool ok = true;
    std::ostringstream d;
    for (int m : {-3, -2, -1, 1, 2, 3}) {
        const double target = m / 7.0;
        double best = 1e9, best_eps = 0;
        for (int j = -8; j <= 8; ++j) {
            const double e = target + j * 0.0025;
            const double v = mai_at(cf, SweepAxis::Cfo, e, trials);
            if (v < best) best = v, best_eps = e;
        }
        const double lo = mai_at(cf, SweepAxis::Cfo, (m - 0.5) / 7.0, trials);
        const double hi = mai_at(cf, SweepAxis::Cfo, (m + 0.5) / 7.0, trials);
        const double g = mai_at(gf, SweepAxis::Cfo, target, trials);
        const bool here = std::abs(best_eps - target) <= 0.01 + 1e-12 && std::min(lo, hi) - best >= 20.0 && g - best >= 10.0;
        ok = ok && here;
        d << m << "/7: min " << f1(best) << " at " << g3(best_eps) << ", lobes " << f1(lo) << "/" << f1(hi)
          << ", GFDM " << f1(g) << "; ";
    }
    report(ok, "cfo-null-structure", d.str() + std::to_string(trials) + " trials");
}

void cfo_ordering() {
    const std::size_t trials = 30;
    const auto grid = linspace(-0.5, 0.5, 101);
    std::map<WaveformKind, std::vector<double>> curves;
    for (auto k : kAll)
        for (const auto& r : mai_sweep(two_user(k), SweepAxis::Cfo, grid, {trials, 1, 1})) curves[k].push_back(r.value);
    auto at = [&](WaveformKind k, double e) {
        const auto i = static_cast<std::size_t>(std::lround((e + 0.5) * 100));
        return curves[k][i];
    };
    const bool near = at(WaveformKind::Gfdm, 0.05) > at(WaveformKind::Ofdm, 0.05) &&
                      at(WaveformKind::Cfbmc, 0.05) > at(WaveformKind::Ofdm, 0.05);
    const bool far = at(WaveformKind::Gfdm, 0.3) < at(WaveformKind::Ofdm, 0.3) &&
                     at(WaveformKind::Cfbmc, 0.3) < at(WaveformKind::Ofdm, 0.3);
    int fb_bad = 0, uf_bad = 0;
    std::ostringstream where;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double fb = curves[WaveformKind::Fbmc][i];
        const double uf = curves[WaveformKind::Ufmc][i];
        bool fb_ok = true, uf_ok = true;
        for (auto k : {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Cfbmc, WaveformKind::Gfdm})
            fb_ok = fb_ok && not_above(fb, curves[k][i], true);
        for (auto k : {WaveformKind::Ofdm, WaveformKind::Cfbmc, WaveformKind::Gfdm})
            uf_ok = uf_ok && not_above(uf, curves[k][i], true);
        if (!fb_ok) ++fb_bad, where << "fbmc@" << g3(grid[i]) << " ";
        if (!uf_ok) ++uf_bad, where << "ufmc@" << g3(grid[i]) << " ";
    }
    const bool ok = near && far && fb_bad == 0 && uf_bad == 0;
    std::ostringstream d;
    d << "eps=0.05 OFDM/GFDM/C-FBMC " << f1(at(WaveformKind::Ofdm, 0.05)) << "/" << f1(at(WaveformKind::Gfdm, 0.05)) << "/"
      << f1(at(WaveformKind::Cfbmc, 0.05)) << " (" << (near ? "ok" : "violated") << "); eps=0.3 "
      << f1(at(WaveformKind::Ofdm, 0.3)) << "/" << f1(at(WaveformKind::Gfdm, 0.3)) << "/" << f1(at(WaveformKind::Cfbmc, 0.3))
      << " (" << (far ? "ok" : "violated") << "); FBMC not lowest at " << fb_bad << "/101, UFMC not second at " << uf_bad
      << "/101 points (floor ties allowed)";
    if (fb_bad + uf_bad > 0) d << " [" << where.str() << "]";
    d << "; " << trials << " trials";
    report(ok, "cfo-ordering", d.str());
}

void gfdm_edge() {
    const std::size_t trials = 100;
    auto s = two_user(WaveformKind::Gfdm);
    const double tau = 0.1;
    for (std::size_t u = 0; u < s.users.size(); ++u)
        if (u != s.user_of_interest) s.users[u].tau_samples = static_cast<int>(std::lround(tau * 256));
    const auto rows = per_symbol_mai(s, {trials, 1, 1});
    const double total_off = estimate_mai_power(s, {trials, 1, 1}).value;
    auto z = s;
    z.waveform.zero_first_symbol = true;
    const double total_on = estimate_mai_power(z, {trials, 1, 1}).value;
    auto neg = s;
    for (std::size_t u = 0; u < neg.users.size(); ++u)
        if (u != neg.user_of_interest) neg.users[u].tau_samples = -neg.users[u].tau_samples;
    const auto neg_rows = per_symbol_mai(neg, {trials, 1, 1});
    auto neg_z = neg;
    neg_z.waveform.zero_first_symbol = true;
    const double neg_off = estimate_mai_power(neg, {trials, 1, 1}).value;
    const double neg_on = estimate_mai_power(neg_z, {trials, 1, 1}).value;
    const bool edges = rows[0] - rows[3] >= 3.0 && rows[6] - rows[3] >= 3.0;
    const bool remedy = total_off - total_on > 1.0;
    std::ostringstream d;
    d << "tau=" << s.users[1].tau_samples << " samples, rows:";
    for (double r : rows) d << " " << f1(r);
    d << "; row0-row3 " << f1(rows[0] - rows[3]) << " dB, row6-row3 " << f1(rows[6] - rows[3])
      << " dB; zero_first_symbol " << f1(total_off) << " -> " << f1(total_on) << " dB (gain " << g3(total_off - total_on)
      << " dB); recorded, not asserted: tau=" << neg.users[1].tau_samples << " rows:";
    for (double r : neg_rows) d << " " << f1(r);
    d << ", zero_first_symbol " << f1(neg_off) << " -> " << f1(neg_on) << " dB; " << trials << " trials";
    report(edges && remedy, "gfdm-edge-symbols", d.str());
}

// Log-linear interpolation of the Eb/N0 where BER crosses `target`.
double crossing(const std::vector<double>& x, const std::vector<double>& ber, double target) {
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (ber[i - 1] >= target && ber[i] < target && ber[i] > 0) {
            const double a = std::log10(ber[i - 1]), b = std::log10(ber[i]), t = std::log10(target);
            return x[i - 1] + (x[i] - x[i - 1]) * (a - t) / (a - b);
        }
    }
    return NAN;
}

void ber_oracle() {
    ExperimentConfig c = preset_config("fig6-ber-async");
    c.num_users = 1;
    c.user_of_interest = 0;
    c.policy = OffsetPolicy::Fixed;
    const auto s = build_scenario(c, WaveformKind::Ofdm);
    std::vector<double> grid;
    for (double e = 8.0; e <= 13.0 + 1e-9; e += 0.5) grid.push_back(e);
    const std::size_t trials = 1000;
    const auto recs = run_ber(s, grid, OffsetPolicy::Fixed, {trials, 7, 1});
    std::vector<double> sim;
    std::uint64_t min_err = UINT64_MAX;
    for (const auto& r : recs) sim.push_back(r.value);
    const double overhead = eb_overhead_db(s);
    // The crossing is only needed near 1e-3; count events on the bracketing points.
    std::vector<double> oracle;
    for (double e : grid) oracle.push_back(qam16_ber_awgn(e));
    const double x_sim = crossing(grid, sim, 1e-3);
    const double x_orc = crossing(grid, oracle, 1e-3);
    for (std::size_t i = 0; i < recs.size(); ++i)
        if (std::abs(grid[i] - x_sim) <= 1.0) min_err = std::min<std::uint64_t>(min_err, recs[i].errors);
    const double raw = x_sim - x_orc;
    const double corrected = raw - overhead;
    const bool ok = std::isfinite(corrected) && std::abs(corrected) <= 0.5 && min_err >= 100;
    report(ok, "ber-oracle",
           "BER=1e-3 at " + g3(x_sim) + " dB simulated vs " + g3(x_orc) + " dB closed form; shift " + g3(raw) +
               " dB with CP energy counted in Eb, " + g3(corrected) + " dB after removing the " + g3(overhead) +
               " dB CP overhead; min errors near crossing " + std::to_string(min_err) + "; " +
               std::to_string(trials) + " packets/point");
}

void ber_ordering() {
    const std::size_t trials = 1000;
    std::map<WaveformKind, double> async, quasi;
    std::map<WaveformKind, std::uint64_t> async_e, quasi_e;
    std::uint64_t bits = 0;
    for (auto k : kAll) {
        const auto s = build_scenario(preset_config("fig6-ber-async"), k);
        const auto a = run_ber(s, {30.0}, OffsetPolicy::Async, {trials, 3, 1}).front();
        const auto q = run_ber(s, {30.0}, OffsetPolicy::QuasiSync, {trials, 3, 1}).front();
        async[k] = a.value, async_e[k] = a.errors;
        quasi[k] = q.value, quasi_e[k] = q.errors;
        bits = a.bits;
    }
    const double oracle = qam16_ber_awgn(30.0);
    const double worst3 =
        std::min({async[WaveformKind::Ofdm], async[WaveformKind::Gfdm], async[WaveformKind::Cfbmc]});
    const bool async_ok = async[WaveformKind::Fbmc] <= async[WaveformKind::Ufmc] && async[WaveformKind::Ufmc] <= worst3;
    // Within a factor 10 of the oracle; the others must sit above that band.
    const double band = 10.0 * oracle;
    const bool quasi_ok = quasi[WaveformKind::Fbmc] <= band && quasi[WaveformKind::Ufmc] <= band &&
                          quasi[WaveformKind::Ofdm] > band && quasi[WaveformKind::Gfdm] > band &&
                          quasi[WaveformKind::Cfbmc] > band;
    std::ostringstream d;
    d << "Eb/N0 30 dB, " << bits << " bits/waveform; async";
    for (auto k : kAll) d << " " << kind_name(k) << "=" << g3(async[k]) << "(" << async_e[k] << ")";
    d << " [" << (async_ok ? "ordered" : "order violated") << "]; quasi-sync";
    for (auto k : kAll) d << " " << kind_name(k) << "=" << g3(quasi[k]) << "(" << quasi_e[k] << ")";
    d << " vs oracle " << g3(oracle) << " [" << (quasi_ok ? "ok" : "violated") << "]";
    report(async_ok && quasi_ok, "ber-ordering", d.str());
}

void determinism() {
    bool ok = true;
    std::ostringstream d;
    for (const auto& name : preset_names()) {
        ExperimentConfig c = preset_config(name);
        c.trials = 2;
        if (c.experiment == ExperimentKind::MaiSweep) c.sweep_points = std::min<std::size_t>(c.sweep_points, 33);
        bool same = true;
        for (auto k : c.waveforms) {
            const auto a = render_csv(c, k, {1, nullptr});
            const auto b = render_csv(c, k, {4, nullptr});
            const auto again = render_csv(c, k, {3, nullptr});
            same = same && a == b && a == again;
        }
        ok = ok && same;
        d << name << (same ? " identical" : " DIFFERS") << "; ";
    }
    report(ok, "determinism", d.str() + "threads 1/4/3, reduced trials and points");
}

}  // namespace

int main() {
    std::printf("# mcwave acceptance, simd=%s\n", std::string(kernels::level_name(kernels::active().level)).c_str());
    round_trip();
    cp_absorption();
    ufmc_range();
    fbmc_flat();
    cfo_nulls();
    cfo_ordering();
    gfdm_edge();
    ber_oracle();
    ber_ordering();
    determinism();
    std::printf("# %d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
