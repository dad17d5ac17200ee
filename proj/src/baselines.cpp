#include "rwasim/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace rwasim {

namespace {

// Stable price orderings; equal prices keep book order.
std::vector<std::size_t> bids_descending(const std::vector<Bid>& bids) {
    std::vector<std::size_t> order(bids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return bids[a].price > bids[b].price;
    });
    return order;
}

std::vector<std::size_t> asks_ascending(const std::vector<Ask>& asks) {
    std::vector<std::size_t> order(asks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return asks[a].price < asks[b].price;
    });
    return order;
}

std::uint32_t demand_at(const std::vector<Bid>& bids, double price) {
    std::uint32_t units = 0;
    for (const Bid& bid : bids) {
        if (bid.price >= price) units += bid.quantity;
    }
    return units;
}

std::uint32_t supply_at(const std::vector<Ask>& asks, double price) {
    std::uint32_t units = 0;
    for (const Ask& ask : asks) {
        if (ask.price <= price) units += ask.quantity;
    }
    return units;
}

void append_trade(std::vector<Trade>& trades, const std::string& buyer,
                  const std::string& seller, std::uint32_t quantity, double unit_price) {
    if (!trades.empty() && trades.back().buyer == buyer &&
        trades.back().seller == seller && trades.back().unit_price == unit_price) {
        trades.back().quantity += quantity;
        return;
    }
    trades.push_back({buyer, seller, quantity, unit_price});
}

} // namespace

MpraResult mpra_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks) {
    MpraResult result;
    const auto bid_order = bids_descending(bids);
    const auto ask_order = asks_ascending(asks);

    // Walk both sides unit by unit while the best remaining bid covers the
    // best remaining ask.
    std::size_t bi = 0, ai = 0;
    std::uint32_t bid_used = 0, ask_used = 0;
    std::vector<std::pair<std::size_t, std::size_t>> unit_pairs;
    while (bi < bid_order.size() && ai < ask_order.size()) {
        const Bid& bid = bids[bid_order[bi]];
        const Ask& ask = asks[ask_order[ai]];
        if (bid.quantity == 0) {
            ++bi;
            continue;
        }
        if (ask.quantity == 0) {
            ++ai;
            continue;
        }
        if (bid.price < ask.price) break;
        unit_pairs.emplace_back(bid_order[bi], ask_order[ai]);
        if (++bid_used == bid.quantity) {
            bid_used = 0;
            ++bi;
        }
        if (++ask_used == ask.quantity) {
            ask_used = 0;
            ++ai;
        }
    }

    result.volume = static_cast<std::uint32_t>(unit_pairs.size());
    if (unit_pairs.empty()) return result;

    // Any price in [last_ask, last_bid] clears exactly `volume` units; locate
    // both edges by bisection and clear at the midpoint.
    double price_cap = 0;
    for (const Bid& bid : bids) price_cap = std::max(price_cap, bid.price);
    for (const Ask& ask : asks) price_cap = std::max(price_cap, ask.price);
    price_cap += 1.0;

    double lo = 0, hi = price_cap;
    while (hi - lo > 1e-6) {  // smallest price with enough supply
        const double mid = 0.5 * (lo + hi);
        if (supply_at(asks, mid) >= result.volume) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double supply_edge = hi;

    lo = 0;
    hi = price_cap;
    while (hi - lo > 1e-6) {  // largest price with enough demand
        const double mid = 0.5 * (lo + hi);
        if (demand_at(bids, mid) >= result.volume) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double demand_edge = lo;

    result.clearing_price = 0.5 * (supply_edge + demand_edge);

    for (const auto& [bid_idx, ask_idx] : unit_pairs) {
        append_trade(result.trades, bids[bid_idx].agent, asks[ask_idx].agent, 1,
                     result.clearing_price);
    }
    return result;
}

namespace {

// One sequential-split allocation pass.  Returns per-bid allocated units.
std::vector<std::uint32_t> tra_allocate(const std::vector<Bid>& bids,
                                        const std::vector<Ask>& asks,
                                        std::vector<Trade>* trades) {
    std::vector<std::uint32_t> remaining(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) remaining[i] = bids[i].quantity;
    std::vector<std::uint32_t> allocated(bids.size(), 0);

    for (std::size_t ask_idx : asks_ascending(asks)) {
        const Ask& ask = asks[ask_idx];
        std::uint32_t stock = ask.quantity;
        if (stock == 0) continue;

        std::vector<std::size_t> quals;  // book order == earliest-first
        for (std::size_t i = 0; i < bids.size(); ++i) {
            if (remaining[i] > 0 && bids[i].price >= ask.price) quals.push_back(i);
        }
        if (quals.empty()) continue;

        // Equal split, remainder one unit each to the earliest buyers, then a
        // mop-up pass for capacity freed by demand caps.
        const std::uint32_t k = static_cast<std::uint32_t>(quals.size());
        const std::uint32_t base = stock / k;
        const std::uint32_t rem = stock % k;
        for (std::size_t i = 0; i < quals.size(); ++i) {
            const std::uint32_t want = base + (i < rem ? 1 : 0);
            const std::uint32_t give = std::min(want, remaining[quals[i]]);
            if (give == 0) continue;
            remaining[quals[i]] -= give;
            allocated[quals[i]] += give;
            stock -= give;
            if (trades) append_trade(*trades, bids[quals[i]].agent, ask.agent, give, 0);
        }
        for (std::size_t i = 0; i < quals.size() && stock > 0; ++i) {
            const std::uint32_t give = std::min(stock, remaining[quals[i]]);
            if (give == 0) continue;
            remaining[quals[i]] -= give;
            allocated[quals[i]] += give;
            stock -= give;
            if (trades) append_trade(*trades, bids[quals[i]].agent, ask.agent, give, 0);
        }
    }
    return allocated;
}

} // namespace

std::uint32_t tra_allocation_for(const std::vector<Bid>& bids, const std::vector<Ask>& asks,
                                 const std::string& agent, double probe_price) {
    std::vector<Bid> probed = bids;
    std::uint32_t total = 0;
    bool found = false;
    for (Bid& bid : probed) {
        if (bid.agent == agent) {
            bid.price = probe_price;
            found = true;
        }
    }
    if (!found) return 0;
    const auto allocated = tra_allocate(probed, asks, nullptr);
    for (std::size_t i = 0; i < probed.size(); ++i) {
        if (probed[i].agent == agent) total += allocated[i];
    }
    return total;
}

TraResult tra_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks) {
    TraResult result;
    const auto allocated = tra_allocate(bids, asks, &result.trades);

    // Critical-value pricing: per buyer, the smallest bid that still secures
    // the same number of units, holding everyone else fixed.
    std::unordered_map<std::string, double> critical;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (allocated[i] == 0) continue;
        const std::string& agent = bids[i].agent;
        if (critical.count(agent)) continue;
        std::uint32_t target = 0;
        for (std::size_t j = 0; j < bids.size(); ++j) {
            if (bids[j].agent == agent) target += allocated[j];
        }
        double lo = 0, hi = bids[i].price;
        if (tra_allocation_for(bids, asks, agent, lo) >= target) {
            critical[agent] = lo;
            continue;
        }
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            if (tra_allocation_for(bids, asks, agent, mid) >= target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        critical[agent] = hi;
    }
    for (Trade& trade : result.trades) trade.unit_price = critical[trade.buyer];
    return result;
}

void CpaAuction::set_budget(const std::string& buyer, Amount budget) {
    budgets_[buyer] = budget;
}

Amount CpaAuction::budget(const std::string& buyer) const {
    auto it = budgets_.find(buyer);
    return it == budgets_.end() ? 0 : it->second;
}

double CpaAuction::anchor_price() const {
    // Median of all distinct ask quotes seen, blended with `virtual_nodes_`
    // synthetic quotes at the previous anchor.
    std::vector<double> prices = ask_history_;
    if (has_anchor_) {
        for (std::uint32_t i = 0; i < virtual_nodes_; ++i) prices.push_back(previous_anchor_);
    }
    std::sort(prices.begin(), prices.end());
    const std::size_t n = prices.size();
    if (n % 2 == 1) return prices[n / 2];
    return 0.5 * (prices[n / 2 - 1] + prices[n / 2]);
}

CpaResult CpaAuction::run_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks) {
    CpaResult result;

    if (income_per_round_ > 0) {
        for (const Bid& bid : bids) budgets_[bid.agent] += income_per_round_;
    }

    // Record every distinct quote an agent has posted.
    for (const Ask& ask : asks) {
        if (ask.quantity == 0) continue;
        auto& seen = seen_ask_prices_[ask.agent];
        if (std::find(seen.begin(), seen.end(), ask.price) == seen.end()) {
            seen.push_back(ask.price);
            ask_history_.push_back(ask.price);
        }
    }

    if (bids.empty() || asks.empty() || ask_history_.empty()) return result;

    double price = 0;
    if (virtual_nodes_ == 0) {
        // Raw one-shot intersection of this round's book.
        MpraResult raw = mpra_round(bids, asks);
        if (raw.volume == 0) return result;
        price = raw.clearing_price;
    } else {
        price = anchor_price();
        previous_anchor_ = price;
        has_anchor_ = true;
    }
    result.clearing_price = price;
    result.cleared = true;

    const Amount unit_micros = to_micros_ceil(price);

    // Willing, funded demand meets willing supply at the anchored price.
    std::vector<std::size_t> demand_units;  // bid indices, one entry per unit
    std::unordered_map<std::string, Amount> spendable;
    for (const auto& [agent, budget] : budgets_) spendable[agent] = budget;
    for (std::size_t idx : bids_descending(bids)) {
        const Bid& bid = bids[idx];
        if (bid.price < price) continue;
        Amount& left = spendable[bid.agent];
        for (std::uint32_t u = 0; u < bid.quantity; ++u) {
            if (left < unit_micros) break;
            left -= unit_micros;
            demand_units.push_back(idx);
        }
    }
    std::vector<std::size_t> supply_units;
    for (std::size_t idx : asks_ascending(asks)) {
        const Ask& ask = asks[idx];
        if (ask.price > price) continue;
        for (std::uint32_t u = 0; u < ask.quantity; ++u) supply_units.push_back(idx);
    }

    const std::size_t volume = std::min(demand_units.size(), supply_units.size());
    for (std::size_t u = 0; u < volume; ++u) {
        const Bid& bid = bids[demand_units[u]];
        const Ask& ask = asks[supply_units[u]];
        append_trade(result.trades, bid.agent, ask.agent, 1, price);
        budgets_[bid.agent] -= unit_micros;
    }
    return result;
}

} // namespace rwasim
