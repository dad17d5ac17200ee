#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwasim/errors.hpp"
#include "rwasim/tokenization.hpp"

namespace rwasim {

// Constant-product market maker for slice tokens, one pool per asset.
//
// A pool starts with the asset's full slice inventory x0 on one side and a
// purely virtual currency reserve v0 on the other, fixing the trading
// constant k = x0 * v0.  Buying q slices moves the state along the curve
//   inventory * (virtual + real reserve) = k,
// so the cost of going from x to x-q is k/(x-q) - k/x.  Because one side is
// virtual the pool quotes rising prices from the very first slice without the
// issuer depositing any currency.
//
// The curve cannot price its own last slice (the hyperbola diverges), so the
// final slice sells at `last_slice_premium` times the penultimate unit cost
// (which is k/2 regardless of pool history).  With the default premium of 2
// a freshly created pool collects exactly (2*x0 - 1) * v0 when fully drained.
//
// After every state change the currency side is recomputed as k/inventory,
// which keeps the invariant tight to a few ulp and makes buy-then-sell round
// trips refund exactly the amount paid.

class LiquidityPool {
  public:
    LiquidityPool(std::string asset_id, std::vector<std::string> slice_ids,
                  double virtual_reserve, double last_slice_premium = 2.0);

    struct BuyResult {
        double cost = 0;
        std::vector<std::string> slice_ids;
    };

    // Cost of acquiring q slices from the current state; 0 for q == 0.
    double quote_buy(std::uint32_t q) const;
    // Payout for returning q slices to the pool.
    double quote_sell(std::uint32_t q) const;

    // Executes a purchase.  Throws InsufficientBudget (leaving the pool
    // untouched) if the cost exceeds `max_cost`.
    BuyResult buy(std::uint32_t q,
                  double max_cost = std::numeric_limits<double>::infinity());
    // Returns slices to the pool for the quoted payout.
    double sell(const std::vector<std::string>& slice_ids);

    const std::string& asset_id() const { return asset_id_; }
    std::uint32_t inventory() const { return static_cast<std::uint32_t>(slice_ids_.size()); }
    double trading_constant() const { return k_; }
    double virtual_reserve() const { return virtual_; }
    // Currency collected from trading (the payable side of the reserve).
    double real_reserve() const { return reserves_ - virtual_; }
    double reserves_total() const { return reserves_; }
    double last_slice_premium() const { return premium_; }
    // Instantaneous price of the next infinitesimal step.
    double marginal_price() const;
    // |x * (v + r) - k|, normalized by k; zero while the pool is drained.
    double invariant_gap() const;

  private:
    std::string asset_id_;
    std::vector<std::string> slice_ids_;  // remaining inventory; sold from the back
    double k_ = 0;
    double virtual_ = 0;
    double reserves_ = 0;  // virtual + real, kept equal to k / inventory
    double premium_ = 2.0;
};

// Pool directory plus the token-registry plumbing for creating pools and
// settling purchases (ownership moves at trade time; currency settlement is
// the caller's concern so it can flow through escrowed ledger transactions).
class AmmMarket {
  public:
    // Lists every slice of `asset_id` into a new pool.  The caller must be
    // the asset owner and still hold all slices, none of them locked.
    LiquidityPool& create_pool(TokenRegistry& registry, const std::string& asset_id,
                               const std::string& owner, double virtual_reserve,
                               double last_slice_premium = 2.0);

    // Buys q slices for `buyer`: pool state moves, tokens change holder.
    LiquidityPool::BuyResult buy(TokenRegistry& registry, const std::string& asset_id,
                                 const std::string& buyer, std::uint32_t q,
                                 double max_cost = std::numeric_limits<double>::infinity());

    LiquidityPool& pool(const std::string& asset_id);
    const LiquidityPool& pool(const std::string& asset_id) const;
    bool pool_exists(const std::string& asset_id) const {
        return pools_.count(asset_id) != 0;
    }
    const std::vector<std::string>& pool_ids() const { return pool_order_; }

  private:
    std::unordered_map<std::string, LiquidityPool> pools_;
    std::vector<std::string> pool_order_;  // creation order, for deterministic scans
};

} // namespace rwasim
