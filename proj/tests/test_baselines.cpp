#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rwasim/baselines.hpp"
#include "rwasim/rng.hpp"

using namespace rwasim;

namespace {

// Exhaustive reference for the rank-matching auction: try every quoted price
// as a candidate, take the max of min(demand, supply), and read the clearing
// interval straight off the sorted books.
struct MpraOracle {
    std::uint32_t volume = 0;
    double price = 0;
};

MpraOracle mpra_oracle(const std::vector<Bid>& bids, const std::vector<Ask>& asks) {
    std::set<double> candidates;
    for (const Bid& b : bids) candidates.insert(b.price);
    for (const Ask& a : asks) candidates.insert(a.price);

    auto demand = [&](double p) {
        std::uint32_t d = 0;
        for (const Bid& b : bids)
            if (b.price >= p) d += b.quantity;
        return d;
    };
    auto supply = [&](double p) {
        std::uint32_t s = 0;
        for (const Ask& a : asks)
            if (a.price <= p) s += a.quantity;
        return s;
    };

    MpraOracle oracle;
    for (double p : candidates) {
        oracle.volume = std::max(oracle.volume, std::min(demand(p), supply(p)));
    }
    if (oracle.volume == 0) return oracle;

    double lo_edge = 0, hi_edge = 0;
    bool lo_set = false;
    for (double p : candidates) {  // ascending: first price with enough supply
        if (!lo_set && supply(p) >= oracle.volume) {
            lo_edge = p;
            lo_set = true;
        }
        if (demand(p) >= oracle.volume) hi_edge = p;  // last price with enough demand
    }
    oracle.price = 0.5 * (lo_edge + hi_edge);
    return oracle;
}

// Reference for the critical value: allocation thresholds can only sit at ask
// prices, so scan them in ascending order.
double tra_oracle_critical(const std::vector<Bid>& bids, const std::vector<Ask>& asks,
                           const std::string& agent, std::uint32_t target) {
    std::set<double> thresholds;
    for (const Ask& a : asks) thresholds.insert(a.price);
    for (double p : thresholds) {
        if (tra_allocation_for(bids, asks, agent, p) >= target) return p;
    }
    return -1;
}

std::vector<Bid> grid_bids(Rng& rng, int count, std::uint32_t max_qty) {
    std::vector<Bid> bids;
    for (int i = 0; i < count; ++i) {
        bids.push_back({"b" + std::to_string(i), 0.25 * (1 + rng.uniform_int(40)),
                        1 + static_cast<std::uint32_t>(rng.uniform_int(max_qty))});
    }
    return bids;
}

std::vector<Ask> grid_asks(Rng& rng, int count, std::uint32_t max_qty) {
    std::vector<Ask> asks;
    for (int i = 0; i < count; ++i) {
        asks.push_back({"s" + std::to_string(i), 0.25 * (1 + rng.uniform_int(40)),
                        1 + static_cast<std::uint32_t>(rng.uniform_int(max_qty))});
    }
    return asks;
}

} // namespace

TEST_CASE("rank matching: two-by-two book clears one unit at the interval midpoint") {
    std::vector<Bid> bids = {{"b0", 5, 1}, {"b1", 3, 1}};
    std::vector<Ask> asks = {{"s0", 2, 1}, {"s1", 4, 1}};
    MpraResult r = mpra_round(bids, asks);
    CHECK(r.volume == 1);
    // Every price in [2, 5] clears one unit; the midpoint is 3.5.
    CHECK(r.clearing_price == doctest::Approx(3.5).epsilon(1e-4));
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].buyer == "b0");
    CHECK(r.trades[0].seller == "s0");
    CHECK(r.trades[0].quantity == 1);
}

TEST_CASE("rank matching: quantities expand into units") {
    std::vector<Bid> bids = {{"b0", 5, 2}};
    std::vector<Ask> asks = {{"s0", 2, 1}, {"s1", 3, 2}};
    MpraResult r = mpra_round(bids, asks);
    CHECK(r.volume == 2);
    CHECK(r.clearing_price == doctest::Approx(4.0).epsilon(1e-4));  // [3, 5] midpoint
    REQUIRE(r.trades.size() == 2);
    CHECK(r.trades[0].seller == "s0");
    CHECK(r.trades[1].seller == "s1");
    CHECK(r.trades[1].quantity == 1);
}

TEST_CASE("rank matching: disjoint books do not clear") {
    std::vector<Bid> bids = {{"b0", 1, 3}};
    std::vector<Ask> asks = {{"s0", 2, 3}};
    MpraResult r = mpra_round(bids, asks);
    CHECK(r.volume == 0);
    CHECK(r.trades.empty());
}

TEST_CASE("rank matching agrees with the exhaustive oracle on random books") {
    Rng rng(7001);
    for (int trial = 0; trial < 300; ++trial) {
        const auto bids = grid_bids(rng, 1 + static_cast<int>(rng.uniform_int(5)), 3);
        const auto asks = grid_asks(rng, 1 + static_cast<int>(rng.uniform_int(5)), 3);
        MpraResult r = mpra_round(bids, asks);
        MpraOracle oracle = mpra_oracle(bids, asks);
        REQUIRE(r.volume == oracle.volume);
        if (r.volume > 0) {
            REQUIRE(r.clearing_price == doctest::Approx(oracle.price).epsilon(1e-4));
            // Individual rationality for every matched unit.
            std::map<std::string, double> bid_of, ask_of;
            for (const Bid& b : bids) bid_of[b.agent] = b.price;
            for (const Ask& a : asks) ask_of[a.agent] = a.price;
            std::uint32_t traded = 0;
            // Slack matches the 1e-6 bisection tolerance on the interval edges.
            for (const Trade& t : r.trades) {
                CHECK(bid_of[t.buyer] >= r.clearing_price - 1e-5);
                CHECK(ask_of[t.seller] <= r.clearing_price + 1e-5);
                traded += t.quantity;
            }
            CHECK(traded == r.volume);
        }
    }
}

TEST_CASE("split auction: single pair clears at the ask") {
    std::vector<Bid> bids = {{"b0", 5, 10}};
    std::vector<Ask> asks = {{"s0", 2, 10}};
    TraResult r = tra_round(bids, asks);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].quantity == 10);
    CHECK(r.trades[0].unit_price == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("split auction: equal split between identical buyers") {
    std::vector<Bid> bids = {{"b0", 5, 10}, {"b1", 5, 10}};
    std::vector<Ask> asks = {{"s0", 1, 10}};
    TraResult r = tra_round(bids, asks);
    std::map<std::string, std::uint32_t> units;
    for (const Trade& t : r.trades) units[t.buyer] += t.quantity;
    CHECK(units["b0"] == 5);
    CHECK(units["b1"] == 5);
    for (const Trade& t : r.trades) {
        CHECK(t.unit_price == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("split auction: remainder units go to earlier buyers") {
    std::vector<Bid> bids = {{"b0", 3, 10}, {"b1", 3, 10}};
    std::vector<Ask> asks = {{"s0", 1, 5}};
    TraResult r = tra_round(bids, asks);
    std::map<std::string, std::uint32_t> units;
    for (const Trade& t : r.trades) units[t.buyer] += t.quantity;
    CHECK(units["b0"] == 3);  // base 2 each, the odd unit lands earliest
    CHECK(units["b1"] == 2);
}

TEST_CASE("split auction: capacity freed by demand caps is re-offered") {
    std::vector<Bid> bids = {{"b0", 5, 1}, {"b1", 5, 10}};
    std::vector<Ask> asks = {{"s0", 1, 6}};
    TraResult r = tra_round(bids, asks);
    std::map<std::string, std::uint32_t> units;
    for (const Trade& t : r.trades) units[t.buyer] += t.quantity;
    CHECK(units["b0"] == 1);
    CHECK(units["b1"] == 5);
}

TEST_CASE("split auction: buyers can win from several sellers") {
    std::vector<Bid> bids = {{"b0", 5, 4}};
    std::vector<Ask> asks = {{"s0", 1, 2}, {"s1", 2, 2}};
    TraResult r = tra_round(bids, asks);
    std::map<std::string, std::uint32_t> from;
    for (const Trade& t : r.trades) from[t.seller] += t.quantity;
    CHECK(from["s0"] == 2);
    CHECK(from["s1"] == 2);
    // Dropping below 2 loses the second seller's units, so 2 is critical.
    for (const Trade& t : r.trades) {
        CHECK(t.unit_price == doctest::Approx(2.0).epsilon(1e-4));
    }
}

TEST_CASE("split auction: prices match the threshold-scan oracle") {
    Rng rng(7002);
    for (int trial = 0; trial < 300; ++trial) {
        const auto bids = grid_bids(rng, 1 + static_cast<int>(rng.uniform_int(5)), 2);
        const auto asks = grid_asks(rng, 1 + static_cast<int>(rng.uniform_int(5)), 2);
        TraResult r = tra_round(bids, asks);

        std::map<std::string, std::uint32_t> units;
        std::map<std::string, double> paid;
        for (const Trade& t : r.trades) {
            units[t.buyer] += t.quantity;
            paid[t.buyer] = t.unit_price;
        }
        for (const auto& [agent, qty] : units) {
            const double oracle = tra_oracle_critical(bids, asks, agent, qty);
            REQUIRE(oracle >= 0);
            REQUIRE(paid[agent] == doctest::Approx(oracle).epsilon(1e-4));
        }
    }
}

TEST_CASE("split auction: truthful bidding dominates for unit-demand buyers") {
    Rng rng(7003);
    for (int trial = 0; trial < 120; ++trial) {
        auto bids = grid_bids(rng, 1 + static_cast<int>(rng.uniform_int(4)), 1);
        const auto asks = grid_asks(rng, 1 + static_cast<int>(rng.uniform_int(4)), 1);

        auto utility_of = [&](const std::vector<Bid>& book, const std::string& agent,
                              double value) {
            TraResult r = tra_round(book, asks);
            for (const Trade& t : r.trades) {
                if (t.buyer == agent) return value - t.unit_price;
            }
            return 0.0;
        };

        for (std::size_t i = 0; i < bids.size(); ++i) {
            const double value = bids[i].price;  // truthful book: bid == value
            const double honest = utility_of(bids, bids[i].agent, value);
            for (int g = 1; g <= 44; ++g) {
                std::vector<Bid> misreported = bids;
                misreported[i].price = 0.25 * g;
                const double deviated = utility_of(misreported, bids[i].agent, value);
                // Tolerance covers the 1e-6 bisection in the payment rule.
                REQUIRE(deviated <= honest + 5e-6);
            }
        }
    }
}

TEST_CASE("consortium auction: anchored price is the ask median") {
    CpaAuction cpa(5);
    std::vector<Bid> bids = {{"b0", 20, 1}, {"b1", 19, 1}};
    std::vector<Ask> asks = {{"s0", 10, 1}, {"s1", 9.8, 1}, {"s2", 10.2, 1},
                             {"s3", 9.9, 1}, {"s4", 10.1, 1}};
    cpa.set_budget("b0", 100 * kMicrosPerUnit);
    cpa.set_budget("b1", 100 * kMicrosPerUnit);
    CpaResult r = cpa.run_round(bids, asks);
    CHECK(r.cleared);
    CHECK(r.clearing_price == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(r.trades.size() == 2);  // both funded bids clear against cheap asks
    for (const Trade& t : r.trades) CHECK(t.unit_price == doctest::Approx(10.0));
}

TEST_CASE("consortium auction: virtual nodes damp a one-sided outlier") {
    std::vector<Bid> base_bids = {{"b0", 10.5, 1}, {"b1", 10.4, 1}, {"b2", 10.3, 1}};
    std::vector<Ask> asks = {{"s0", 9.8, 1}, {"s1", 9.9, 1}, {"s2", 10.0, 1}};
    std::vector<Bid> outlier_bids = base_bids;
    outlier_bids.push_back({"whale", 100.0, 1});

    auto fund = [](CpaAuction& cpa, const std::vector<Bid>& bids) {
        for (const Bid& b : bids) cpa.set_budget(b.agent, 1'000 * kMicrosPerUnit);
    };

    CpaAuction raw_a(0), raw_b(0), anchored_a(5), anchored_b(5);
    fund(raw_a, base_bids);
    fund(raw_b, outlier_bids);
    fund(anchored_a, base_bids);
    fund(anchored_b, outlier_bids);

    const double raw_base = raw_a.run_round(base_bids, asks).clearing_price;
    const double raw_outlier = raw_b.run_round(outlier_bids, asks).clearing_price;
    const double anchored_base = anchored_a.run_round(base_bids, asks).clearing_price;
    const double anchored_outlier = anchored_b.run_round(outlier_bids, asks).clearing_price;

    const double raw_shift = std::abs(raw_outlier - raw_base);
    const double anchored_shift = std::abs(anchored_outlier - anchored_base);
    CHECK(raw_shift > 1e-3);          // the raw intersection follows the whale
    CHECK(anchored_shift < 1e-9);     // the anchored price does not move
    CHECK(anchored_shift < raw_shift);
}

TEST_CASE("consortium auction: budgets persist and gate participation") {
    CpaAuction cpa(5);
    cpa.set_budget("b0", 10 * kMicrosPerUnit);
    std::vector<Bid> bids = {{"b0", 10, 1}};
    std::vector<Ask> asks = {{"s0", 4, 1}};

    CpaResult r1 = cpa.run_round(bids, asks);
    CHECK(r1.trades.size() == 1);
    CHECK(r1.clearing_price == doctest::Approx(4.0));
    CHECK(cpa.budget("b0") == 6 * kMicrosPerUnit);

    CpaResult r2 = cpa.run_round(bids, asks);
    CHECK(r2.trades.size() == 1);
    CHECK(cpa.budget("b0") == 2 * kMicrosPerUnit);

    CpaResult r3 = cpa.run_round(bids, asks);  // 2 left, price 4: cannot afford
    CHECK(r3.trades.empty());
    CHECK(cpa.budget("b0") == 2 * kMicrosPerUnit);
}

TEST_CASE("consortium auction: per-round income tops budgets up") {
    CpaAuction cpa(5, /*income_per_round=*/3 * kMicrosPerUnit);
    cpa.set_budget("b0", 0);
    std::vector<Bid> bids = {{"b0", 10, 1}};
    std::vector<Ask> asks = {{"s0", 4, 1}};
    CHECK(cpa.run_round(bids, asks).trades.empty());   // 3 < 4
    CHECK(cpa.run_round(bids, asks).trades.size() == 1);  // 6 >= 4
    CHECK(cpa.budget("b0") == 2 * kMicrosPerUnit);
}

TEST_CASE("mechanisms are deterministic for identical books") {
    Rng rng(7004);
    const auto bids = grid_bids(rng, 5, 3);
    const auto asks = grid_asks(rng, 5, 3);

    auto serialize = [](const std::vector<Trade>& trades) {
        std::string out;
        for (const Trade& t : trades) {
            out += t.buyer + "|" + t.seller + "|" + std::to_string(t.quantity) + "|" +
                   std::to_string(t.unit_price) + ";";
        }
        return out;
    };

    CHECK(serialize(mpra_round(bids, asks).trades) ==
          serialize(mpra_round(bids, asks).trades));
    CHECK(serialize(tra_round(bids, asks).trades) ==
          serialize(tra_round(bids, asks).trades));
}
