#include "mcwave/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mcwave/kernels.hpp"

namespace mcwave {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
    throw InvalidArgument("config field '" + field + "': " + msg);
}

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) field_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Reader child(const std::string& key) {
        seen_.insert(key);
        return Reader(j_.at(key), full(key));
    }

    void get(const std::string& key, int& dst) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) field_error(full(key), "expected an integer");
            const auto x = v->get<long long>();
            if (x < INT32_MIN || x > INT32_MAX) field_error(full(key), "out of range");
            dst = static_cast<int>(x);
        }
    }
    void get(const std::string& key, std::size_t& dst) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) field_error(full(key), "expected a non-negative integer");
            dst = v->get<std::size_t>();
        }
    }
    void get(const std::string& key, std::uint64_t& dst, bool required) {
        const json* v = take(key);
        if (!v) {
            if (required) field_error(full(key), "required (reproducibility needs an explicit seed)");
            return;
        }
        if (!v->is_number_unsigned()) field_error(full(key), "expected a non-negative integer");
        dst = v->get<std::uint64_t>();
    }
    void get(const std::string& key, double& dst) {
        if (const json* v = take(key)) {
            if (!v->is_number()) field_error(full(key), "expected a number");
            dst = v->get<double>();
        }
    }
    void get(const std::string& key, bool& dst) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) field_error(full(key), "expected true or false");
            dst = v->get<bool>();
        }
    }
    void get(const std::string& key, std::string& dst) {
        if (const json* v = take(key)) {
            if (!v->is_string()) field_error(full(key), "expected a string");
            dst = v->get<std::string>();
        }
    }
    const json* take(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) field_error(full(it.key()), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ExperimentKind parse_experiment(const std::string& s) {
    for (auto k : {ExperimentKind::MaiSweep, ExperimentKind::SymbolMai, ExperimentKind::FilterSpectra, ExperimentKind::Ber})
        if (s == experiment_name(k)) return k;
    field_error("experiment", "unknown experiment '" + s + "' (expected mai_sweep, symbol_mai, filter_spectra, ber)");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool circular(WaveformKind k) { return k == WaveformKind::Gfdm || k == WaveformKind::Cfbmc; }

std::vector<double> sweep_values(const ExperimentConfig& cfg) {
    return linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points);
}

}  // namespace

std::string_view experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::MaiSweep: return "mai_sweep";
        case ExperimentKind::SymbolMai: return "symbol_mai";
        case ExperimentKind::FilterSpectra: return "filter_spectra";
        case ExperimentKind::Ber: return "ber";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (name.empty() || name.find_first_of("/\\") != std::string::npos) field_error("name", "must be a non-empty file stem");
    if (waveforms.empty()) field_error("waveforms", "at least one waveform is required");
    {
        std::set<WaveformKind> uniq(waveforms.begin(), waveforms.end());
        if (uniq.size() != waveforms.size()) field_error("waveforms", "duplicate waveform");
    }
    const bool any_circular = std::any_of(waveforms.begin(), waveforms.end(), circular);
    auto uses = [&](WaveformKind k) { return std::find(waveforms.begin(), waveforms.end(), k) != waveforms.end(); };

    if (fft_size < 8 || !is_pow2(fft_size)) field_error("waveform.fft_size", "must be a power of two >= 8");
    if (cp_len < 0 || cp_len >= fft_size) field_error("waveform.cp_len", "must lie in [0, fft_size)");
    if (symbols < 1) field_error("waveform.symbols", "must be positive");
    if (any_circular) {
        if (symbols_per_packet < 1) field_error("waveform.symbols_per_packet", "must be positive");
        if (symbols % static_cast<std::size_t>(symbols_per_packet) != 0)
            field_error("waveform.symbols", "must be a multiple of symbols_per_packet for GFDM / C-FBMC");
    }
    if (uses(WaveformKind::Cfbmc) && (symbols_per_packet < 2 || symbols_per_packet > 8))
        field_error("waveform.symbols_per_packet", "C-FBMC prototype overlap must lie in [2, 8]");
    if (uses(WaveformKind::Ufmc)) {
        if (ufmc_filter_taps < 3 || ufmc_filter_taps - 1 > fft_size)
            field_error("waveform.ufmc.filter_taps", "must lie in [3, fft_size + 1]");
        if (!(ufmc_attenuation_db > 0.0)) field_error("waveform.ufmc.attenuation_db", "must be positive");
        if (ufmc_subband_size < 1) field_error("waveform.ufmc.subband_size", "must be positive");
    }
    if (uses(WaveformKind::Fbmc) && (fbmc_overlap < 2 || fbmc_overlap > 8))
        field_error("waveform.fbmc.overlap", "must lie in [2, 8]");
    if (uses(WaveformKind::Gfdm) && !(gfdm_rolloff > 0.0 && gfdm_rolloff <= 1.0))
        field_error("waveform.gfdm.rolloff", "must lie in (0, 1]");

    if (num_users < 1) field_error("allocation.num_users", "must be positive");
    if (block_size < 1) field_error("allocation.block_size", "must be positive");
    if (guard < 0) field_error("allocation.guard", "must be non-negative");
    if (static_cast<long>(num_users) * block_size + static_cast<long>(num_users - 1) * guard > fft_size)
        field_error("allocation", "num_users * block_size + (num_users - 1) * guard exceeds fft_size");
    if (user_of_interest < 0 || user_of_interest >= num_users)
        field_error("allocation.user_of_interest", "must lie in [0, num_users)");

    if (!std::isfinite(interferer_tau)) field_error("interferers.tau", "must be finite");
    if (!std::isfinite(interferer_epsilon)) field_error("interferers.epsilon", "must be finite");
    if (!(interferer_power_weight > 0.0) || !std::isfinite(interferer_power_weight))
        field_error("interferers.power_weight", "must be positive");

    if (!std::isfinite(sweep_start) || !std::isfinite(sweep_stop)) field_error("sweep", "start and stop must be finite");
    if (sweep_points < 1) field_error("sweep.points", "must be positive");
    switch (experiment) {
        case ExperimentKind::MaiSweep:
            if (sweep_axis != "tau" && sweep_axis != "epsilon") field_error("sweep.axis", "mai_sweep needs tau or epsilon");
            break;
        case ExperimentKind::Ber:
            if (sweep_axis != "ebn0_db") field_error("sweep.axis", "ber needs ebn0_db");
            break;
        case ExperimentKind::SymbolMai:
        case ExperimentKind::FilterSpectra:
            if (!std::all_of(waveforms.begin(), waveforms.end(), circular))
                field_error("waveforms", std::string(experiment_name(experiment)) + " supports gfdm and cfbmc only");
            break;
    }
    if (spectrum_subcarrier < 0 || spectrum_subcarrier >= fft_size)
        field_error("spectrum_subcarrier", "must lie in [0, fft_size)");
    if (trials < 1) field_error("trials", "must be positive");
}

std::vector<std::string> preset_names() {
    return {"fig3-to-sweep", "fig4-cfo-sweep", "fig5-filter-spectra", "fig6-ber-async", "fig7-ber-quasisync"};
}

ExperimentConfig preset_config(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    c.waveforms = {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Fbmc, WaveformKind::Cfbmc, WaveformKind::Gfdm};
    if (name == "fig3-to-sweep") {
        c.experiment = ExperimentKind::MaiSweep;
        c.sweep_axis = "tau";
        c.sweep_start = -0.5;
        c.sweep_stop = 0.5;
        c.sweep_points = 129;
    } else if (name == "fig4-cfo-sweep") {
        c.experiment = ExperimentKind::MaiSweep;
        c.sweep_axis = "epsilon";
        c.sweep_start = -0.5;
        c.sweep_stop = 0.5;
        c.sweep_points = 101;
    } else if (name == "fig5-filter-spectra") {
        c.experiment = ExperimentKind::FilterSpectra;
        c.waveforms = {WaveformKind::Cfbmc, WaveformKind::Gfdm};
        c.trials = 1;
    } else if (name == "fig6-ber-async" || name == "fig7-ber-quasisync") {
        c.experiment = ExperimentKind::Ber;
        c.policy = name == "fig6-ber-async" ? OffsetPolicy::Async : OffsetPolicy::QuasiSync;
        c.num_users = 5;
        c.user_of_interest = 2;
        c.sweep_axis = "ebn0_db";
        c.sweep_start = 0.0;
        c.sweep_stop = 30.0;
        c.sweep_points = 16;
        // 7 x 36 x 4 = 1008 bits per packet; 1000 packets clears 10^6 bits.
        c.trials = 1000;
    } else {
        std::string list;
        for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
        throw InvalidArgument("unknown preset '" + std::string(name) + "'; available presets: " + list);
    }
    return c;
}

std::string serialize_config(const ExperimentConfig& c, bool include_output, bool pretty) {
    json j;
    j["name"] = c.name;
    j["experiment"] = std::string(experiment_name(c.experiment));
    j["waveforms"] = json::array();
    for (auto w : c.waveforms) j["waveforms"].push_back(std::string(kind_name(w)));
    j["waveform"] = {
        {"fft_size", c.fft_size},
        {"cp_len", c.cp_len},
        {"symbols", c.symbols},
        {"symbols_per_packet", c.symbols_per_packet},
        {"zero_first_symbol", c.zero_first_symbol},
        {"ufmc", {{"filter_taps", c.ufmc_filter_taps}, {"attenuation_db", c.ufmc_attenuation_db}, {"subband_size", c.ufmc_subband_size}}},
        {"fbmc", {{"overlap", c.fbmc_overlap}}},
        {"gfdm", {{"rolloff", c.gfdm_rolloff}, {"receiver", std::string(receiver_name(c.gfdm_receiver))}}},
    };
    j["allocation"] = {{"num_users", c.num_users}, {"block_size", c.block_size}, {"guard", c.guard},
                       {"user_of_interest", c.user_of_interest}};
    j["interferers"] = {{"tau", c.interferer_tau}, {"epsilon", c.interferer_epsilon}, {"power_weight", c.interferer_power_weight}};
    j["sweep"] = {{"axis", c.sweep_axis}, {"start", c.sweep_start}, {"stop", c.sweep_stop}, {"points", c.sweep_points}};
    j["policy"] = std::string(policy_name(c.policy));
    j["spectrum_subcarrier"] = c.spectrum_subcarrier;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    if (include_output) j["output"] = c.output;
    return pretty ? j.dump(2) : j.dump();
}

ExperimentConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    Reader r(j, "");
    r.get("name", c.name);
    std::string s = std::string(experiment_name(c.experiment));
    r.get("experiment", s);
    c.experiment = parse_experiment(s);
    if (const json* w = r.take("waveforms")) {
        if (!w->is_array()) field_error("waveforms", "expected an array of names");
        c.waveforms.clear();
        for (const auto& e : *w) {
            if (!e.is_string()) field_error("waveforms", "expected an array of names");
            try {
                c.waveforms.push_back(parse_kind(e.get<std::string>()));
            } catch (const InvalidArgument& ex) {
                field_error("waveforms", ex.what());
            }
        }
    }
    if (r.has("waveform")) {
        Reader w = r.child("waveform");
        w.get("fft_size", c.fft_size);
        w.get("cp_len", c.cp_len);
        w.get("symbols", c.symbols);
        w.get("symbols_per_packet", c.symbols_per_packet);
        w.get("zero_first_symbol", c.zero_first_symbol);
        if (w.has("ufmc")) {
            Reader u = w.child("ufmc");
            u.get("filter_taps", c.ufmc_filter_taps);
            u.get("attenuation_db", c.ufmc_attenuation_db);
            u.get("subband_size", c.ufmc_subband_size);
            u.finish();
        }
        if (w.has("fbmc")) {
            Reader f = w.child("fbmc");
            f.get("overlap", c.fbmc_overlap);
            f.finish();
        }
        if (w.has("gfdm")) {
            Reader g = w.child("gfdm");
            g.get("rolloff", c.gfdm_rolloff);
            std::string rx = std::string(receiver_name(c.gfdm_receiver));
            g.get("receiver", rx);
            try {
                c.gfdm_receiver = parse_receiver(rx);
            } catch (const InvalidArgument& ex) {
                field_error("waveform.gfdm.receiver", ex.what());
            }
            g.finish();
        }
        w.finish();
    }
    if (r.has("allocation")) {
        Reader a = r.child("allocation");
        a.get("num_users", c.num_users);
        a.get("block_size", c.block_size);
        a.get("guard", c.guard);
        a.get("user_of_interest", c.user_of_interest);
        a.finish();
    }
    if (r.has("interferers")) {
        Reader i = r.child("interferers");
        i.get("tau", c.interferer_tau);
        i.get("epsilon", c.interferer_epsilon);
        i.get("power_weight", c.interferer_power_weight);
        i.finish();
    }
    if (r.has("sweep")) {
        Reader sw = r.child("sweep");
        sw.get("axis", c.sweep_axis);
        sw.get("start", c.sweep_start);
        sw.get("stop", c.sweep_stop);
        sw.get("points", c.sweep_points);
        sw.finish();
    }
    std::string pol = std::string(policy_name(c.policy));
    r.get("policy", pol);
    try {
        c.policy = parse_policy(pol);
    } catch (const InvalidArgument& ex) {
        field_error("policy", ex.what());
    }
    r.get("spectrum_subcarrier", c.spectrum_subcarrier);
    r.get("trials", c.trials);
    r.get("seed", c.seed, true);
    r.get("output", c.output);
    r.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (!text.empty() && text.front() == '#') {
        std::istringstream lines(text);
        std::string line;
        const std::string tag = "# config: ";
        while (std::getline(lines, line) && !line.empty() && line.front() == '#')
            if (line.rfind(tag, 0) == 0) return parse_config(line.substr(tag.size()));
        throw InvalidArgument(path.string() + ": CSV header carries no '# config:' line");
    }
    return parse_config(text);
}

WaveformConfig build_waveform(const ExperimentConfig& c, WaveformKind kind) {
    WaveformConfig w;
    w.kind = kind;
    w.fft_size = c.fft_size;
    w.cp_len = c.cp_len;
    w.symbols_per_packet = c.symbols_per_packet;
    w.zero_first_symbol = c.zero_first_symbol;
    switch (kind) {
        case WaveformKind::Ofdm: break;
        case WaveformKind::Ufmc:
            w.cp_len = 0;
            w.subband_filter = dsp::design_dolph_chebyshev(c.ufmc_filter_taps, c.ufmc_attenuation_db);
            w.ufmc_subband_size = c.ufmc_subband_size;
            break;
        case WaveformKind::Fbmc:
            w.cp_len = 0;
            w.overlap = c.fbmc_overlap;
            w.prototype = dsp::design_phydyas(c.fbmc_overlap, c.fft_size);
            break;
        case WaveformKind::Cfbmc:
            w.prototype = dsp::design_phydyas(c.symbols_per_packet, c.fft_size);
            break;
        case WaveformKind::Gfdm:
            w.prototype = dsp::design_rrc(c.gfdm_rolloff, c.symbols_per_packet * c.fft_size + 1, c.fft_size);
            w.gfdm_receiver = c.gfdm_receiver;
            break;
    }
    return w;
}

Scenario build_scenario(const ExperimentConfig& c, WaveformKind kind) {
    Scenario s;
    s.waveform = build_waveform(c, kind);
    s.allocation = make_block_allocation(c.num_users, c.block_size, c.guard, c.fft_size);
    s.symbols = c.symbols;
    s.user_of_interest = static_cast<std::size_t>(c.user_of_interest);
    for (int u = 0; u < c.num_users; ++u) {
        UserSpec spec;
        spec.block = static_cast<std::size_t>(u);
        if (u != c.user_of_interest) {
            spec.tau_samples = static_cast<int>(std::lround(c.interferer_tau * c.fft_size));
            spec.epsilon = c.interferer_epsilon;
            spec.power_weight = c.interferer_power_weight;
        }
        s.users.push_back(spec);
    }
    return s;
}

std::string render_csv(const ExperimentConfig& full, WaveformKind kind, const RunOptions& opts) {
    full.validate();
    ExperimentConfig cfg = full;
    cfg.waveforms = {kind};
    const Scenario sc = build_scenario(cfg, kind);
    const MonteCarlo mc{cfg.trials, cfg.seed, opts.threads};
    const auto payload = sc.payload_rows();

    std::ostringstream os;
    os << "# mcwave " << experiment_name(cfg.experiment) << " output\n";
    os << "# waveform: " << kind_name(kind) << "\n";
    os << "# seed: " << cfg.seed << "\n";
    os << "# simd: " << kernels::level_name(kernels::active().level) << "\n";
    os << "# payload_symbols: " << payload.size() << " of " << sc.symbols << "\n";
    os << "# payload_bits_per_burst: " << payload.size() * static_cast<std::size_t>(sc.interest_block().count) * 4 << "\n";

    auto log = [&](const std::string& line) {
        if (opts.log) *opts.log << "[" << cfg.name << " " << kind_name(kind) << "] " << line << std::endl;
    };

    std::ostringstream body;
    switch (cfg.experiment) {
        case ExperimentKind::MaiSweep: {
            const bool to = cfg.sweep_axis == "tau";
            body << (to ? "tau,tau_samples,mai_db,trials\n" : "epsilon,mai_db,trials\n");
            for (double v : sweep_values(cfg)) {
                const auto r = mai_sweep(sc, to ? SweepAxis::TimingOffset : SweepAxis::Cfo, {v}, mc).front();
                body << fmt(v) << ",";
                if (to) body << std::lround(v * cfg.fft_size) << ",";
                body << fmt(r.value) << "," << r.trials << "\n";
                log(cfg.sweep_axis + "=" + fmt(v) + " mai_db=" + fmt(r.value));
            }
            break;
        }
        case ExperimentKind::SymbolMai: {
            os << "# interferer_tau_samples: " << std::lround(cfg.interferer_tau * cfg.fft_size) << "\n";
            body << "symbol,mai_db,trials\n";
            const auto rows = per_symbol_mai(sc, mc);
            for (std::size_t m = 0; m < rows.size(); ++m) body << m << "," << fmt(rows[m]) << "," << cfg.trials << "\n";
            log("rows=" + std::to_string(rows.size()));
            break;
        }
        case ExperimentKind::FilterSpectra: {
            const bool zf = kind == WaveformKind::Gfdm && cfg.gfdm_receiver == GfdmReceiver::ZeroForcing;
            os << "# receiver: " << (zf ? "zf" : "mf") << "\n";
            os << "# subcarrier: " << cfg.spectrum_subcarrier << "\n";
            body << "bin,subcarrier_offset,amplitude,amplitude_db\n";
            const auto spec = rx_filter_spectrum(sc.waveform, cfg.spectrum_subcarrier);
            const long kp = cfg.symbols_per_packet;
            const long len = static_cast<long>(spec.size());
            for (long b = 0; b < len; ++b) {
                // Offset from the filter centre in subcarrier units, wrapped to [-N/2, N/2).
                long d = b - cfg.spectrum_subcarrier * kp;
                d = ((d + len / 2) % len + len) % len - len / 2;
                body << b << "," << fmt(static_cast<double>(d) / kp) << "," << fmt(spec[b]) << ","
                     << fmt(20.0 * std::log10(std::max(spec[b], 1e-150))) << "\n";
            }
            log("bins=" + std::to_string(spec.size()));
            break;
        }
        case ExperimentKind::Ber: {
            os << "# policy: " << policy_name(cfg.policy) << "\n";
            os << "# eb_overhead_db: " << fmt(eb_overhead_db(sc)) << "\n";
            body << "ebn0_db,ber,errors,bits,trials,low_error_count\n";
            const auto recs = run_ber(sc, sweep_values(cfg), cfg.policy, mc);
            for (const auto& r : recs) {
                body << fmt(r.x) << "," << fmt(r.value) << "," << r.errors << "," << r.bits << "," << r.trials << ","
                     << (r.low_error_count ? 1 : 0) << "\n";
                log("ebn0_db=" + fmt(r.x) + " ber=" + fmt(r.value) + " errors=" + std::to_string(r.errors));
            }
            break;
        }
    }
    os << "# config: " << serialize_config(cfg, false, false) << "\n";
    os << body.str();
    return os.str();
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (auto kind : cfg.waveforms) {
        const std::string text = render_csv(cfg, kind, opts);
        const auto path = dir / (cfg.name + "_" + std::string(kind_name(kind)) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + path.string());
        written.push_back(path);
    }
    return written;
}

std::string dump_filter_csv(std::string_view design, const FilterDumpOptions& o) {
    dsp::PrototypeFilter f;
    if (design == "rrc")
        f = dsp::design_rrc(o.rolloff, o.taps > 0 ? o.taps : 7 * o.fft_size + 1, o.fft_size);
    else if (design == "dolph-chebyshev")
        f = dsp::design_dolph_chebyshev(o.taps > 0 ? o.taps : 33, o.attenuation_db);
    else if (design == "phydyas")
        f = dsp::design_phydyas(o.overlap, o.fft_size);
    else
        throw InvalidArgument("unknown filter design '" + std::string(design) +
                              "' (expected rrc, dolph-chebyshev, phydyas)");
    std::ostringstream os;
    os << "# design: " << design << "\n";
    if (const auto* p = std::get_if<dsp::PhydyasDesign>(&f.design)) {
        os << "# coefficients:";
        for (double h : p->coefficients) os << " " << fmt(h);
        os << "\n";
    }
    os << "# samples_per_symbol: " << f.samples_per_symbol << "\n";
    os << "index,tap\n";
    for (std::size_t i = 0; i < f.taps.size(); ++i) os << i << "," << fmt(f.taps[i]) << "\n";
    return os.str();
}

}  // namespace mcwave
