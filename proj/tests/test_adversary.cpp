#include <doctest.h>

#include <functional>

#include "rwasim/adversary.hpp"
#include "rwasim/errors.hpp"

using namespace rwasim;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const SimError& e) {
        return e.code();
    }
    FAIL("expected SimError");
    return Errc::ConfigInvalid;
}

std::size_t count_flags(const std::vector<bool>& flags) {
    std::size_t n = 0;
    for (bool f : flags) n += f ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("flagging: floor(ratio * n) agents, seeded and reproducible") {
    Rng rng_a(42), rng_b(42), rng_c(43);
    const auto flags_a = flag_malicious(100, 0.3, rng_a);
    const auto flags_b = flag_malicious(100, 0.3, rng_b);
    const auto flags_c = flag_malicious(100, 0.3, rng_c);
    CHECK(count_flags(flags_a) == 30);
    CHECK(flags_a == flags_b);   // same seed, same selection
    CHECK(flags_a != flags_c);   // different seed, different selection
    CHECK(count_flags(flags_c) == 30);

    Rng rng_d(1);
    CHECK(count_flags(flag_malicious(7, 0.3, rng_d)) == 2);  // floor(2.1)
    CHECK(count_flags(flag_malicious(100, 0.0, rng_d)) == 0);
}

TEST_CASE("flagging: ratios outside [0, 0.30] are refused") {
    Rng rng(1);
    CHECK(code_of([&] { flag_malicious(10, 0.31, rng); }) == Errc::RatioOutOfRange);
    CHECK(code_of([&] { flag_malicious(10, -0.01, rng); }) == Errc::RatioOutOfRange);
    CHECK(code_of([&] { flag_malicious(10, 1.5, rng); }) == Errc::RatioOutOfRange);
}

TEST_CASE("buyer collusion depresses flagged bids only") {
    std::vector<Bid> bids = {{"b0", 80, 1}, {"b1", 60, 1}, {"b2", 90, 1}};
    AttackConfig config;
    config.kind = AttackKind::BuyerCollusion;
    apply_buyer_collusion(bids, {false, true, false}, config);
    CHECK(bids[0].price == 80);
    CHECK(bids[1].price == 30);  // halved
    CHECK(bids[2].price == 90);
    CHECK(bids[1].quantity == 1);  // quantity untouched
}

TEST_CASE("seller collusion inflates asks and withholds supply") {
    std::vector<Ask> asks = {{"s0", 50, 1}, {"s1", 70, 4}};
    AttackConfig config;
    config.kind = AttackKind::SellerCollusion;
    apply_seller_collusion(asks, {true, true}, config);
    CHECK(asks[0].price == 100);
    CHECK(asks[0].quantity == 0);  // floor(1 * 0.5): whole license withheld
    CHECK(asks[1].price == 140);
    CHECK(asks[1].quantity == 2);
}

TEST_CASE("defaults: only flagged buyers, probability respected, seeded") {
    std::vector<std::string> buyers = {"b0", "b1"};
    std::vector<bool> flags = {true, false};
    std::vector<Trade> trades;
    for (int i = 0; i < 200; ++i) {
        trades.push_back({i % 2 == 0 ? "b0" : "b1", "s0", 1, 10.0});
    }
    AttackConfig config;
    config.kind = AttackKind::Default;

    config.default_probability = 0.0;
    Rng rng_zero(5);
    for (bool d : draw_defaults(trades, buyers, flags, config, rng_zero)) CHECK_FALSE(d);

    config.default_probability = 1.0;
    Rng rng_one(5);
    const auto all = draw_defaults(trades, buyers, flags, config, rng_one);
    for (std::size_t i = 0; i < trades.size(); ++i) {
        CHECK(all[i] == (trades[i].buyer == "b0"));  // every flagged trade defaults
    }

    config.default_probability = 0.5;
    Rng rng_half_a(6), rng_half_b(6);
    const auto half_a = draw_defaults(trades, buyers, flags, config, rng_half_a);
    const auto half_b = draw_defaults(trades, buyers, flags, config, rng_half_b);
    CHECK(half_a == half_b);  // reproducible
    std::size_t defaulted = 0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
        if (half_a[i]) {
            CHECK(trades[i].buyer == "b0");
            ++defaulted;
        }
    }
    CHECK(defaulted > 25);  // ~50 of the 100 flagged-buyer trades
    CHECK(defaulted < 75);
}

TEST_CASE("attack kind names round-trip") {
    for (AttackKind kind : {AttackKind::None, AttackKind::BuyerCollusion,
                            AttackKind::SellerCollusion, AttackKind::Default}) {
        auto parsed = parse_attack_kind(attack_kind_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK_FALSE(parse_attack_kind("sybil").has_value());
}
