#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwasim/currency.hpp"
#include "rwasim/errors.hpp"

namespace rwasim {

// Benchmark allocation mechanisms for whole spectrum licenses.
//
// All three consume one round's order book (per-license bids and asks with
// integer quantities) and produce unit trades.  Ties in every sort resolve by
// book position, so identical books always clear identically.

struct Bid {
    std::string agent;
    double price = 0;          // per license
    std::uint32_t quantity = 0;
};

struct Ask {
    std::string agent;
    double price = 0;
    std::uint32_t quantity = 0;
};

struct Trade {
    std::string buyer;
    std::string seller;
    std::uint32_t quantity = 0;
    double unit_price = 0;
};

// --- rank-matching uniform-price auction -----------------------------------
//
// Bids sorted descending meet asks sorted ascending; the executed volume is
// the longest prefix where bid >= ask (which equals the maximum of
// min(demand(p), supply(p)) over all prices).  Every price inside
// [highest matched ask, lowest matched bid] supports that volume; clearing
// uses the midpoint of that interval, located by bisection to 1e-6.

struct MpraResult {
    std::vector<Trade> trades;
    double clearing_price = 0;
    std::uint32_t volume = 0;
};

MpraResult mpra_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks);

// --- sequential split auction with critical-value pricing -------------------
//
// Sellers clear one at a time in ascending ask order.  Each seller's quantity
// is split equally among the buyers whose bid covers the ask and who still
// have unmet demand; remainders go one unit each to the earliest such buyers
// in book order.  A buyer pays, per unit, the smallest bid at which it would
// still have received its allocation, found by re-running the round's
// allocation inside a bisection to 1e-6.  For unit-demand buyers that is the
// classic monotone-allocation critical payment, so truthful bidding is a
// dominant strategy.

struct TraResult {
    std::vector<Trade> trades;
};

TraResult tra_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks);

// Allocation probe used by the pricing search and by oracle tests: total
// units `agent` wins when its bid price is replaced by `probe_price`.
std::uint32_t tra_allocation_for(const std::vector<Bid>& bids, const std::vector<Ask>& asks,
                                 const std::string& agent, double probe_price);

// --- consortium double auction with anchored clearing -----------------------
//
// A stateful uniform-price double auction meant to be run repeatedly by a
// standing consortium.  Buyer budgets persist across rounds (optionally
// topped up by a fixed income), and purchases are settled against those
// budgets.
//
// With `virtual_nodes` == 0 the round clears at the raw book intersection.
// With `virtual_nodes` > 0 the clearing price is anchored: it is the median
// of every distinct ask quote the auction has ever seen, blended with
// `virtual_nodes` synthetic quotes pinned at the previous anchor.  Anchoring
// makes the price insensitive to one-sided outliers and to demand-side
// manipulation; executed volume is then min(demand, supply) at the anchor.

struct CpaResult {
    std::vector<Trade> trades;
    double clearing_price = 0;
    bool cleared = false;
};

class CpaAuction {
  public:
    explicit CpaAuction(std::uint32_t virtual_nodes = 5, Amount income_per_round = 0)
        : virtual_nodes_(virtual_nodes), income_per_round_(income_per_round) {}

    void set_budget(const std::string& buyer, Amount budget);
    Amount budget(const std::string& buyer) const;

    CpaResult run_round(const std::vector<Bid>& bids, const std::vector<Ask>& asks);

    double current_anchor() const { return previous_anchor_; }

  private:
    double anchor_price() const;

    std::uint32_t virtual_nodes_;
    Amount income_per_round_;
    std::unordered_map<std::string, Amount> budgets_;
    // Distinct (agent, price) ask quotes observed, in first-seen order.
    std::vector<double> ask_history_;
    std::unordered_map<std::string, std::vector<double>> seen_ask_prices_;
    double previous_anchor_ = 0;
    bool has_anchor_ = false;
};

} // namespace rwasim
