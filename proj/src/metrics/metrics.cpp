#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "mcwave/metrics.hpp"

namespace mcwave {
namespace {

constexpr std::uint64_t kOffsetStream = 0xA5A5'0000'0000'0001ULL;
constexpr std::uint64_t kNoiseStream = 0x5A5A'0000'0000'0000ULL;

Scenario trial_scenario(const Scenario& s, std::uint64_t seed, std::size_t trial) {
    Scenario t = s;
    for (std::size_t u = 0; u < t.users.size(); ++u) t.users[u].grid_seed = derive_seed(seed, trial, u);
    return t;
}

struct MaiSums {
    std::vector<double> row_power;  // sum |X_hat|^2 per symbol row
};

MaiSums mai_trial(const Scenario& s, std::uint64_t seed, std::size_t trial) {
    const Scenario t = trial_scenario(s, seed, trial);
    const Received rx = synthesize_received(t, {.mute_interest = true});
    const SymbolGrid x = bs_receive(t, rx.buffer, rx.users[t.user_of_interest].gain);
    MaiSums out{std::vector<double>(x.rows(), 0.0)};
    for (std::size_t m = 0; m < x.rows(); ++m)
        for (const cplx& v : x.row(m)) out.row_power[m] += std::norm(v);
    return out;
}

std::vector<MaiSums> run_mai_trials(const Scenario& s, const MonteCarlo& mc) {
    s.validate();
    if (s.noise_variance != 0.0) throw InvalidArgument("MAI estimation requires a noiseless scenario");
    if (mc.trials == 0) throw InvalidArgument("MAI estimation requires trials > 0");
    std::vector<MaiSums> per_trial(mc.trials);
    parallel_for(mc.trials, mc.threads, [&](std::size_t i) { per_trial[i] = mai_trial(s, mc.seed, i); });
    return per_trial;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

MetricRecord estimate_mai_power(const Scenario& s, const MonteCarlo& mc) {
    const auto per_trial = run_mai_trials(s, mc);
    const auto rows = s.payload_rows();
    double total = 0.0;
    for (const auto& t : per_trial)
        for (std::size_t m : rows) total += t.row_power[m];
    const double count = static_cast<double>(mc.trials) * static_cast<double>(rows.size()) * s.interest_block().count;
    MetricRecord r;
    r.value = to_db(total / count);
    r.trials = mc.trials;
    return r;
}

std::vector<double> per_symbol_mai(const Scenario& s, const MonteCarlo& mc) {
    const auto per_trial = run_mai_trials(s, mc);
    std::vector<double> out(s.symbols, 0.0);
    for (const auto& t : per_trial)
        for (std::size_t m = 0; m < s.symbols; ++m) out[m] += t.row_power[m];
    const double count = static_cast<double>(mc.trials) * s.interest_block().count;
    for (double& v : out) v = to_db(v / count);
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t num_points) {
    if (num_points == 0) throw InvalidArgument("linspace: num_points must be positive");
    if (num_points == 1) return {lo};
    std::vector<double> v(num_points);
    for (std::size_t i = 0; i < num_points; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(num_points - 1);
    return v;
}

std::vector<MetricRecord> mai_sweep(const Scenario& tmpl, SweepAxis axis, const std::vector<double>& values,
                                    const MonteCarlo& mc) {
    std::vector<MetricRecord> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("mai_sweep: non-finite sweep value");
        Scenario s = tmpl;
        for (std::size_t u = 0; u < s.users.size(); ++u) {
            if (u == s.user_of_interest) continue;
            if (axis == SweepAxis::TimingOffset)
                s.users[u].tau_samples = static_cast<int>(std::lround(v * s.waveform.fft_size));
            else
                s.users[u].epsilon = v;
        }
        MetricRecord r = estimate_mai_power(s, mc);
        r.axis = axis == SweepAxis::TimingOffset ? "tau" : "epsilon";
        r.x = v;
        out.push_back(r);
    }
    return out;
}

std::string_view policy_name(OffsetPolicy p) {
    switch (p) {
        case OffsetPolicy::Fixed: return "fixed";
        case OffsetPolicy::Async: return "async";
        case OffsetPolicy::QuasiSync: return "quasi_sync";
    }
    return "?";
}

OffsetPolicy parse_policy(std::string_view name) {
    for (auto p : {OffsetPolicy::Fixed, OffsetPolicy::Async, OffsetPolicy::QuasiSync})
        if (name == policy_name(p)) return p;
    throw InvalidArgument("unknown offset policy '" + std::string(name) + "' (expected fixed, async, quasi_sync)");
}

std::pair<int, int> quasi_sync_tau_range(const WaveformConfig& cfg) {
    const int n = cfg.fft_size;
    switch (cfg.kind) {
        case WaveformKind::Ufmc: {
            const int t = static_cast<int>(std::lround(0.02 * n));
            return {-t, t};
        }
        case WaveformKind::Fbmc: return {-n / 2, n / 2};
        default: return {0, cfg.cp_len};
    }
}

double qam16_ber_awgn(double ebn0_db) {
    const double g = std::pow(10.0, ebn0_db / 10.0);
    const double a = std::sqrt(0.8 * g);
    return (3.0 * q_function(a) + 2.0 * q_function(3.0 * a) - q_function(5.0 * a)) / 4.0;
}

double eb_overhead_db(const Scenario& s, std::size_t draws) {
    if (draws == 0) throw InvalidArgument("eb_overhead_db: draws must be positive");
    Scenario t = s;
    t.noise_variance = 0.0;
    t.users = {s.users.at(s.user_of_interest)};
    t.users[0].tau_samples = 0;
    t.users[0].epsilon = 0.0;
    t.user_of_interest = 0;
    const auto rows = t.payload_rows();
    const auto& block = t.interest_block();
    const double nsym = static_cast<double>(rows.size()) * block.count;
    double acc_db = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        t.users[0].grid_seed = derive_seed(s.users[s.user_of_interest].grid_seed, d, 0);
        const Received rx = synthesize_received(t);
        const auto& me = rx.users[0];
        double sym_energy = 0.0;
        for (std::size_t m : rows)
            for (int k = block.first; k <= block.last(); ++k)
                sym_energy += std::norm(me.grid(m, static_cast<std::size_t>(k)));
        // Unit-power burst: its energy equals its length.
        const double eb_burst = static_cast<double>(rx.buffer.size()) / (4.0 * nsym);
        const double eb_detector = me.gain * me.gain * (sym_energy / nsym) / 4.0;
        acc_db += 10.0 * std::log10(eb_burst / eb_detector);
    }
    return acc_db / static_cast<double>(draws);
}

std::vector<MetricRecord> run_ber(const Scenario& tmpl, const std::vector<double>& ebn0_db, OffsetPolicy policy,
                                  const MonteCarlo& mc) {
    tmpl.validate();
    if (mc.trials == 0) throw InvalidArgument("run_ber: trials must be positive");
    if (ebn0_db.empty()) throw InvalidArgument("run_ber: empty Eb/N0 list");
    const std::size_t npts = ebn0_db.size();
    const int n = tmpl.waveform.fft_size;
    const auto qs = quasi_sync_tau_range(tmpl.waveform);

    std::vector<std::vector<std::uint64_t>> errors(mc.trials, std::vector<std::uint64_t>(npts, 0));
    std::vector<std::uint64_t> bits_per_trial(mc.trials, 0);

    parallel_for(mc.trials, mc.threads, [&](std::size_t trial) {
        Scenario s = trial_scenario(tmpl, mc.seed, trial);
        s.noise_variance = 0.0;
        std::mt19937_64 rng(derive_seed(mc.seed, trial, kOffsetStream));
        std::uniform_real_distribution<double> half(-0.5, 0.5);
        std::uniform_int_distribution<int> qs_tau(qs.first, qs.second);
        for (std::size_t u = 0; u < s.users.size(); ++u) {
            if (u == s.user_of_interest || policy == OffsetPolicy::Fixed) continue;
            if (policy == OffsetPolicy::Async)
                s.users[u].tau_samples = static_cast<int>(std::lround(half(rng) * n));
            else
                s.users[u].tau_samples = qs_tau(rng);
            s.users[u].epsilon = half(rng);
        }
        const Received rx = synthesize_received(s);
        const auto& me = rx.users[s.user_of_interest];
        const double eb = s.users[s.user_of_interest].power_weight * static_cast<double>(rx.buffer.size()) /
                          static_cast<double>(me.bits.size());
        const auto rows = s.payload_rows();
        bits_per_trial[trial] = me.bits.size();
        std::vector<cplx> syms;
        syms.reserve(me.bits.size() / 4);
        for (std::size_t p = 0; p < npts; ++p) {
            const double var = eb / std::pow(10.0, ebn0_db[p] / 10.0);
            const ComplexBuffer y = dsp::add_awgn(rx.buffer, var, derive_seed(mc.seed, trial, kNoiseStream + p));
            const SymbolGrid x = bs_receive(s, y, me.gain);
            syms.clear();
            for (std::size_t m : rows)
                for (const cplx& v : x.row(m)) syms.push_back(v);
            const auto decided = dsp::demap_qam16(syms);
            std::uint64_t e = 0;
            for (std::size_t i = 0; i < decided.size(); ++i) e += decided[i] != me.bits[i];
            errors[trial][p] = e;
        }
    });

    std::vector<MetricRecord> out(npts);
    std::uint64_t total_bits = 0;
    for (auto b : bits_per_trial) total_bits += b;
    for (std::size_t p = 0; p < npts; ++p) {
        std::uint64_t e = 0;
        for (std::size_t t = 0; t < mc.trials; ++t) e += errors[t][p];
        auto& r = out[p];
        r.axis = "ebn0_db";
        r.x = ebn0_db[p];
        r.trials = mc.trials;
        r.errors = e;
        r.bits = total_bits;
        r.value = static_cast<double>(e) / static_cast<double>(total_bits);
        r.low_error_count = e < 100;
    }
    return out;
}

}  // namespace mcwave
