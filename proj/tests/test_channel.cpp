#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wsnsim/channel.hpp"
#include "wsnsim/rng.hpp"

using namespace wsnsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// 50 log-spaced PER targets from 1e-8 up to 0.9.
std::vector<double> per_targets() {
    std::vector<double> g;
    const double lo = -8.0, hi = std::log10(0.9);
    for (int i = 0; i < 50; ++i) g.push_back(std::pow(10.0, lo + i * (hi - lo) / 49.0));
    return g;
}
} // namespace

TEST_CASE("free-space loss at the usual checkpoints") {
    REQUIRE_THAT(free_space_loss_db(1.0), WithinAbs(40.05, 0.01));
    REQUIRE_THAT(free_space_loss_db(1.0), WithinRel(40.052008056115, 1e-10));
    REQUIRE_THAT(free_space_loss_db(2.0), WithinRel(46.072607969395, 1e-10));
    REQUIRE_THAT(free_space_loss_db(10.0), WithinRel(60.052008056115, 1e-10));
    // Other carrier frequencies move the whole curve, not its shape.
    REQUIRE_THAT(free_space_loss_db(1.0, 1e9), WithinRel(32.447783221883, 1e-10));
}

TEST_CASE("every range doubling adds 20*log10(2) dB") {
    const double six = 20.0 * std::log10(2.0);
    REQUIRE_THAT(six, WithinAbs(6.0206, 1e-4));
    for (double r : {0.5, 1.0, 2.0, 5.0, 10.0, 128.0})
        REQUIRE_THAT(free_space_loss_db(2 * r) - free_space_loss_db(r), WithinAbs(six, 1e-6));
}

TEST_CASE("loss grows monotonically with range") {
    double prev = free_space_loss_db(0.25);
    for (double r = 0.5; r < 40.0; r += 0.25) {
        const double cur = free_space_loss_db(r);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("nonpositive range or frequency is rejected") {
    REQUIRE_THROWS_AS(free_space_loss_db(0.0), std::domain_error);
    REQUIRE_THROWS_AS(free_space_loss_db(-1.0), std::domain_error);
    REQUIRE_THROWS_AS(free_space_loss_db(1.0, 0.0), std::domain_error);
}

TEST_CASE("link budget adds up in dB") {
    ChannelParams p; // 0 dBm, -5 dB antennas both ends, 1 m
    REQUIRE_THAT(received_power_dbm(p),
                 WithinAbs(0.0 - 5.0 - 5.0 - free_space_loss_db(1.0), 1e-12));
    REQUIRE_THAT(link_margin_db(p), WithinAbs(received_power_dbm(p) + 75.0, 1e-12));

    // The margin crosses zero around 17.7 m for this budget: check the sign
    // flips somewhere between 10 m and 30 m.
    p.range_m = 10.0;
    REQUIRE(link_margin_db(p) > 0.0);
    p.range_m = 30.0;
    REQUIRE(link_margin_db(p) < 0.0);
}

TEST_CASE("per_from_ber at the reference points") {
    REQUIRE_THAT(per_from_ber(1e-3, 73), WithinAbs(0.07043, 1e-5));
    REQUIRE_THAT(per_from_ber(1e-3, 73), WithinRel(7.043312242172e-2, 1e-10));
    REQUIRE_THAT(per_from_ber(1e-4, 73), WithinRel(7.273782087307e-3, 1e-10));
    REQUIRE(per_from_ber(0.0, 73) == 0.0);
    REQUIRE(per_from_ber(1.0, 73) == 1.0);
}

TEST_CASE("per_from_ber survives tiny rates that would cancel in the naive form") {
    // 1 - (1-b)^L collapses to 0 in double arithmetic for b this small; the
    // expm1/log1p form keeps the leading term L*b.
    const double b = 1e-18;
    REQUIRE_THAT(per_from_ber(b, 73), WithinRel(73.0 * b, 1e-9));
}

TEST_CASE("ber_from_per matches its reference point and inverts per_from_ber") {
    REQUIRE_THAT(ber_from_per(0.001, 73), WithinRel(1.370539010198e-5, 1e-10));
    for (std::size_t bits : {49u, 65u, 73u, 329u}) {
        for (double per : per_targets()) {
            const double ber = ber_from_per(per, bits);
            REQUIRE_THAT(per_from_ber(ber, bits), WithinRel(per, 1e-12));
        }
    }
}

TEST_CASE("domain errors") {
    REQUIRE_THROWS_AS(per_from_ber(-0.1, 73), std::domain_error);
    REQUIRE_THROWS_AS(per_from_ber(1.1, 73), std::domain_error);
    REQUIRE_THROWS_AS(per_from_ber(0.5, 0), std::domain_error);
    REQUIRE_THROWS_AS(ber_from_per(-0.1, 73), std::domain_error);
    REQUIRE_THROWS_AS(ber_from_per(2.0, 73), std::domain_error);
    REQUIRE_THROWS_AS(ber_from_per(0.5, 0), std::domain_error);
}

TEST_CASE("sample_corruption: empirical flip rate matches, stream length fixed") {
    SplitMix64 rng(42);
    const std::size_t bits = 73;
    const int frames = 20000;
    const double ber = 0.01;
    std::uint64_t flips = 0;
    for (int i = 0; i < frames; ++i) {
        const auto positions = sample_corruption(rng, bits, ber);
        flips += positions.size();
        for (std::size_t k = 1; k < positions.size(); ++k)
            REQUIRE(positions[k] > positions[k - 1]); // sorted, unique
        for (std::size_t p : positions) REQUIRE(p < bits);
    }
    const double expected = ber * bits * frames;
    const double sigma = std::sqrt(ber * (1 - ber) * bits * frames);
    REQUIRE(std::abs(static_cast<double>(flips) - expected) < 4 * sigma);
}

TEST_CASE("sample_corruption draws the same variates regardless of outcome") {
    // Two rates, same seed: the k-th frame consumes the same number of draws
    // either way, so downstream consumption stays aligned.
    SplitMix64 a(7), b(7);
    (void)sample_corruption(a, 73, 0.0);
    (void)sample_corruption(b, 73, 0.5);
    REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("corruption edge rates") {
    SplitMix64 rng(1);
    REQUIRE(sample_corruption(rng, 73, 0.0).empty());
    REQUIRE(sample_corruption(rng, 73, 1.0).size() == 73);
    REQUIRE(sample_corruption(rng, 0, 0.5).empty());
    REQUIRE_THROWS_AS(sample_corruption(rng, 73, -1.0), std::domain_error);
}

TEST_CASE("BER models map margins to rates") {
    SECTION("fixed ignores the margin") {
        const BerModel m = BerModel::fixed(1e-4);
        REQUIRE(m.ber_at_margin(-100.0) == 1e-4);
        REQUIRE(m.ber_at_margin(100.0) == 1e-4);
    }
    SECTION("threshold switches at zero margin") {
        const BerModel m = BerModel::threshold(0.5, 1e-6);
        REQUIRE(m.ber_at_margin(-0.001) == 0.5);
        REQUIRE(m.ber_at_margin(0.0) == 1e-6);
        REQUIRE(m.ber_at_margin(30.0) == 1e-6);
    }
    SECTION("table interpolates and clamps") {
        const BerModel m = BerModel::table({{0.0, 1e-2}, {10.0, 1e-4}, {20.0, 0.0}});
        REQUIRE(m.ber_at_margin(-5.0) == 1e-2);
        REQUIRE(m.ber_at_margin(25.0) == 0.0);
        REQUIRE_THAT(m.ber_at_margin(5.0), WithinRel(0.5 * (1e-2 + 1e-4), 1e-12));
        REQUIRE_THAT(m.ber_at_margin(15.0), WithinRel(0.5e-4, 1e-12));
    }
    SECTION("construction guards") {
        REQUIRE_THROWS_AS(BerModel::fixed(-0.1), std::invalid_argument);
        REQUIRE_THROWS_AS(BerModel::table({}), std::invalid_argument);
        REQUIRE_THROWS_AS(BerModel::table({{0.0, 0.1}, {0.0, 0.2}}), std::invalid_argument);
    }
}
