#include <doctest.h>

#include <cmath>
#include <set>

#include "mcwave/metrics.hpp"
#include "mcwave/uplink.hpp"

using namespace mcwave;

namespace {

Scenario two_users(WaveformKind kind, int tau = 0, double eps = 0.0, int n = 256) {
    Scenario s;
    s.waveform = reference_config(kind, n);
    s.allocation = make_block_allocation(2, 36, 1, n);
    s.users = {UserSpec{0, 0, 0.0, 1.0, 101}, UserSpec{1, tau, eps, 1.0, 202}};
    s.user_of_interest = 0;
    s.symbols = 7;
    return s;
}

// X_hat - X on the interest block.
SymbolGrid residual(const Scenario& s) {
    const auto rx = synthesize_received(s);
    const auto& me = rx.users[s.user_of_interest];
    auto z = bs_receive(s, rx.buffer, me.gain);
    const auto x = me.grid.columns(static_cast<std::size_t>(s.interest_block().first),
                                   static_cast<std::size_t>(s.interest_block().count));
    for (std::size_t i = 0; i < z.flat().size(); ++i) z.flat()[i] -= x.flat()[i];
    return z;
}

double mean_power(const SymbolGrid& g) {
    double p = 0.0;
    for (auto v : g.flat()) p += std::norm(v);
    return p / static_cast<double>(g.flat().size());
}

double db(double p) { return 10.0 * std::log10(p + 1e-320); }

}  // namespace

TEST_CASE("block allocation layouts") {
    const auto a2 = make_block_allocation(2, 36, 1, 256);
    REQUIRE(a2.blocks.size() == 2);
    CHECK(a2.blocks[1].last() - a2.blocks[0].first + 1 == 73);
    CHECK(a2.blocks[0].count + a2.blocks[1].count == 72);
    CHECK(a2.blocks[1].first - a2.blocks[0].last() == 2);
    CHECK(a2.blocks[0].first == 91);

    const auto a5 = make_block_allocation(5, 36, 1, 256);
    REQUIRE(a5.blocks.size() == 5);
    CHECK(a5.blocks[4].last() - a5.blocks[0].first + 1 == 184);
    CHECK(a5.blocks[0].first == 36);
    // the middle block sits on the band centre
    CHECK(a5.blocks[2].contains(128));
    CHECK(a5.blocks[2].first - a5.blocks[0].first == 2 * 37);

    const auto a1 = make_block_allocation(1, 256, 0, 256);
    REQUIRE(a1.blocks.size() == 1);
    CHECK(a1.blocks[0] == SubcarrierBlock{0, 256});

    CHECK_THROWS_AS(make_block_allocation(8, 36, 1, 256), InvalidArgument);
    CHECK_THROWS_AS(make_block_allocation(0, 36, 1, 256), InvalidArgument);
    CHECK_THROWS_AS(make_block_allocation(2, 36, -1, 256), InvalidArgument);
}

TEST_CASE("ufmc users get subbands cut from their block") {
    const auto s = two_users(WaveformKind::Ufmc);
    const auto w = user_waveform(s, 1);
    REQUIRE(w.subbands.size() == 3);
    CHECK(w.subbands[0] == SubcarrierBlock{128, 12});
    CHECK(w.subbands[2] == SubcarrierBlock{152, 12});
    CHECK(user_waveform(two_users(WaveformKind::Ofdm), 1).subbands.empty());
}

TEST_CASE("derive_seed") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 50; ++t)
        for (std::uint64_t u = 0; u < 5; ++u) seen.insert(derive_seed(7, t, u));
    CHECK(seen.size() == 250);
    CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
    CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
    CHECK(derive_seed(7, 1, 2) != derive_seed(8, 1, 2));
}

TEST_CASE("single synchronized user is its own modulated burst") {
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Fbmc, WaveformKind::Gfdm}) {
        Scenario s;
        s.waveform = reference_config(kind, 64);
        s.allocation = make_block_allocation(2, 12, 1, 64);
        s.users = {UserSpec{0, 0, 0.0, 1.0, 55}};
        const auto rx = synthesize_received(s);
        const auto tx = make_modem(user_waveform(s, 0))->modulate(rx.users[0].grid);
        REQUIRE(rx.buffer.size() == tx.burst.size());
        CHECK(rx.buffer.samples == tx.burst.samples);
        CHECK(rx.users[0].gain == tx.gain);
        CHECK(rx.users[0].bits.size() == 7 * 12 * 4);
    }
}

TEST_CASE("two synchronized users are recovered from the composite") {
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Fbmc, WaveformKind::Cfbmc, WaveformKind::Gfdm}) {
        INFO(kind_name(kind));
        for (std::size_t who : {0u, 1u}) {
            auto s = two_users(kind);
            s.user_of_interest = who;
            const double r = mean_power(residual(s));
            if (kind == WaveformKind::Fbmc || kind == WaveformKind::Cfbmc) {
                CHECK(db(r) < -55.0);
            } else {
                CHECK(std::sqrt(r) < 1e-8);
            }
        }
    }
}

TEST_CASE("synthesis is deterministic") {
    auto s = two_users(WaveformKind::Cfbmc, 13, 0.21);
    s.noise_variance = 0.1;
    s.noise_seed = 5;
    const auto a = synthesize_received(s), b = synthesize_received(s);
    CHECK(a.buffer.samples == b.buffer.samples);
    CHECK(a.users[1].bits == b.users[1].bits);
    s.noise_seed = 6;
    CHECK(synthesize_received(s).buffer.samples != a.buffer.samples);
}

TEST_CASE("residual equals the interference seen with the interest user muted") {
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Gfdm}) {
        INFO(kind_name(kind));
        const auto s = two_users(kind, 40, 0.17);
        const auto res = residual(s);
        const auto muted = synthesize_received(s, {true});
        const auto z = bs_receive(s, muted.buffer, muted.users[0].gain);
        double err = 0.0;
        for (std::size_t i = 0; i < z.flat().size(); ++i) err = std::max(err, std::abs(z.flat()[i] - res.flat()[i]));
        CHECK(err < 1e-10);
        CHECK(mean_power(z) > 1e-6);
        // muted interest and no interferer: nothing left
        auto alone = s;
        alone.users.resize(1);
        CHECK(mean_power(bs_receive(alone, synthesize_received(alone, {true}).buffer, 1.0)) == 0.0);
    }
}

TEST_CASE("ofdm interferer inside the cp causes no interference") {
    for (int tau : {0, 1, 16, 32}) {
        const auto s = two_users(WaveformKind::Ofdm, tau);
        const auto muted = synthesize_received(s, {true});
        CHECK(db(mean_power(bs_receive(s, muted.buffer, muted.users[0].gain))) < -200.0);
    }
    const auto s = two_users(WaveformKind::Ofdm, 40);
    const auto muted = synthesize_received(s, {true});
    CHECK(db(mean_power(bs_receive(s, muted.buffer, muted.users[0].gain))) > -40.0);
}

TEST_CASE("fbmc barely notices a half-symbol timing offset") {
    double self = 0.0, off = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto s = two_users(WaveformKind::Fbmc);
        s.users[0].grid_seed = derive_seed(9, seed, 0);
        s.users[1].grid_seed = derive_seed(9, seed, 1);
        auto sync = s;
        sync.users.resize(1);
        self += mean_power(residual(sync));
        s.users[1].tau_samples = 128;
        off += mean_power(residual(s));
    }
    MESSAGE("fbmc self residual " << db(self / 8) << " dB, with interferer at N/2 " << db(off / 8) << " dB");
    CHECK(db(off / 8) < db(self / 8) + 3.0);
}

TEST_CASE("interference from two users superposes") {
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Fbmc, WaveformKind::Gfdm}) {
        INFO(kind_name(kind));
        Scenario s;
        s.waveform = reference_config(kind, 256);
        s.allocation = make_block_allocation(3, 36, 1, 256);
        s.users = {UserSpec{1, 0, 0.0, 1.0, 1}, UserSpec{0, 37, 0.11, 1.0, 2}, UserSpec{2, -21, -0.3, 0.5, 3}};
        s.user_of_interest = 0;
        auto only_a = s, only_b = s;
        only_a.users.pop_back();
        only_b.users.erase(only_b.users.begin() + 1);
        const auto r = residual(s), ra = residual(only_a), rb = residual(only_b);
        const auto rs = residual([&] {
            auto t = s;
            t.users.resize(1);
            return t;
        }());
        double err = 0.0;
        for (std::size_t i = 0; i < r.flat().size(); ++i)
            err = std::max(err, std::abs(r.flat()[i] - (ra.flat()[i] + rb.flat()[i] - rs.flat()[i])));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("interference power scales with the interferer's power weight") {
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Cfbmc}) {
        auto s = two_users(kind, 50, 0.23);
        const auto m1 = synthesize_received(s, {true});
        const double p1 = mean_power(bs_receive(s, m1.buffer, m1.users[0].gain));
        s.users[1].power_weight = 3.7;
        const auto m2 = synthesize_received(s, {true});
        const double p2 = mean_power(bs_receive(s, m2.buffer, m2.users[0].gain));
        CHECK(p2 / p1 == doctest::Approx(3.7).epsilon(1e-10));
    }
}

TEST_CASE("a guard subcarrier never increases interference") {
    const MonteCarlo mc{20, 3, 1};
    for (auto kind : {WaveformKind::Ofdm, WaveformKind::Ufmc, WaveformKind::Gfdm}) {
        for (auto [tau, eps] : {std::pair{64, 0.0}, std::pair{0, 0.25}}) {
            INFO(kind_name(kind) << " tau " << tau << " eps " << eps);
            auto s = two_users(kind, tau, eps);
            s.allocation = make_block_allocation(2, 36, 0, 256);
            const double g0 = estimate_mai_power(s, mc).value;
            s.allocation = make_block_allocation(2, 36, 1, 256);
            const double g1 = estimate_mai_power(s, mc).value;
            CHECK(g1 <= g0 + 0.1);
        }
    }
}

TEST_CASE("an interferer advanced past its whole burst contributes nothing") {
    auto s = two_users(WaveformKind::Ofdm, -5000);
    const auto muted = synthesize_received(s, {true});
    CHECK(muted.buffer.energy() == 0.0);
}

TEST_CASE("scenario validation") {
    auto s = two_users(WaveformKind::Ofdm);
    CHECK_NOTHROW(s.validate());
    auto t = s;
    t.users[0].tau_samples = 3;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.users[0].epsilon = 0.1;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.users[1].power_weight = 0.0;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.users[1].block = 5;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.user_of_interest = 2;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.allocation.blocks[1].first = 100;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.noise_variance = -1.0;
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = s;
    t.users.clear();
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
    t = two_users(WaveformKind::Gfdm);
    t.symbols = 5;
    CHECK_THROWS_AS(synthesize_received(t), InvalidArgument);
    t = s;
    t.allocation = make_block_allocation(2, 12, 1, 64);
    CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("payload rows") {
    auto s = two_users(WaveformKind::Gfdm);
    s.symbols = 14;
    CHECK(s.payload_rows().size() == 14);
    s.waveform.zero_first_symbol = true;
    const auto rows = s.payload_rows();
    CHECK(rows.size() == 12);
    CHECK(rows.front() == 1);
    CHECK(std::find(rows.begin(), rows.end(), 7) == rows.end());
    auto o = two_users(WaveformKind::Ofdm);
    o.waveform.zero_first_symbol = true;
    CHECK(o.payload_rows().size() == 7);
}
