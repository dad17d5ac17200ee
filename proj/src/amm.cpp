#include "rwasim/amm.hpp"

#include <cmath>
#include <utility>

namespace rwasim {

LiquidityPool::LiquidityPool(std::string asset_id, std::vector<std::string> slice_ids,
                             double virtual_reserve, double last_slice_premium)
    : asset_id_(std::move(asset_id)),
      slice_ids_(std::move(slice_ids)),
      virtual_(virtual_reserve),
      premium_(last_slice_premium) {
    if (virtual_reserve <= 0 || !std::isfinite(virtual_reserve)) {
        raise(Errc::NonPositiveVirtualReserve, asset_id_);
    }
    if (slice_ids_.empty()) raise(Errc::InvalidCount, "pool needs at least one slice");
    if (premium_ <= 0) raise(Errc::ConfigInvalid, "last slice premium must be positive");
    k_ = static_cast<double>(slice_ids_.size()) * virtual_;
    reserves_ = k_ / static_cast<double>(slice_ids_.size());
}

double LiquidityPool::marginal_price() const {
    const double x = static_cast<double>(inventory());
    if (x == 0) return std::numeric_limits<double>::infinity();
    return reserves_ / x;
}

double LiquidityPool::invariant_gap() const {
    const double x = static_cast<double>(inventory());
    if (x == 0) return 0;
    return std::abs(x * reserves_ - k_) / k_;
}

double LiquidityPool::quote_buy(std::uint32_t q) const {
    if (q == 0) return 0.0;
    const std::uint32_t x = inventory();
    if (x == 0) raise(Errc::EmptyPool, asset_id_);
    if (q > x) {
        raise(Errc::InsufficientInventory,
              asset_id_ + ": " + std::to_string(q) + " requested, " + std::to_string(x) +
                  " available");
    }
    // The hyperbola prices every slice except the last; that one goes for a
    // fixed multiple of the penultimate unit cost k/1 - k/2 = k/2.
    if (q == x) {
        const double curve_part = (x >= 2) ? k_ / 1.0 - reserves_ : 0.0;
        return curve_part + premium_ * (k_ / 2.0);
    }
    return k_ / static_cast<double>(x - q) - reserves_;
}

double LiquidityPool::quote_sell(std::uint32_t q) const {
    if (q == 0) return 0.0;
    const std::uint32_t x = inventory();
    const double payout = reserves_ - k_ / static_cast<double>(x + q);
    if (payout < 0 || payout > real_reserve() + 1e-9) {
        raise(Errc::InsufficientReserve,
              asset_id_ + ": payout " + std::to_string(payout) + " exceeds collected " +
                  std::to_string(real_reserve()));
    }
    return payout;
}

LiquidityPool::BuyResult LiquidityPool::buy(std::uint32_t q, double max_cost) {
    BuyResult result;
    result.cost = quote_buy(q);
    if (result.cost > max_cost) {
        raise(Errc::InsufficientBudget,
              asset_id_ + ": cost " + std::to_string(result.cost) + " over cap " +
                  std::to_string(max_cost));
    }
    result.slice_ids.reserve(q);
    for (std::uint32_t i = 0; i < q; ++i) {
        result.slice_ids.push_back(std::move(slice_ids_.back()));
        slice_ids_.pop_back();
    }
    if (!slice_ids_.empty()) {
        reserves_ = k_ / static_cast<double>(slice_ids_.size());
    } else {
        reserves_ += result.cost;  // drained: the curve ends, money stays
    }
    return result;
}

double LiquidityPool::sell(const std::vector<std::string>& slice_ids) {
    const double payout = quote_sell(static_cast<std::uint32_t>(slice_ids.size()));
    for (const std::string& id : slice_ids) slice_ids_.push_back(id);
    reserves_ = k_ / static_cast<double>(slice_ids_.size());
    return payout;
}

LiquidityPool& AmmMarket::create_pool(TokenRegistry& registry, const std::string& asset_id,
                                      const std::string& owner, double virtual_reserve,
                                      double last_slice_premium) {
    if (pools_.count(asset_id)) {
        raise(Errc::ConfigInvalid, "pool for '" + asset_id + "' already exists");
    }
    const SpectrumAsset& asset = registry.asset(asset_id);
    if (asset.owner != owner) {
        raise(Errc::NotHolder, "'" + owner + "' does not own '" + asset_id + "'");
    }
    if (!asset.fractionalized || asset.slice_ids.empty()) {
        raise(Errc::InvalidCount, "asset '" + asset_id + "' has no slices to pool");
    }
    for (const std::string& slice_id : asset.slice_ids) {
        const SliceToken& slice = registry.token(slice_id);
        if (slice.holder != owner) {
            raise(Errc::NotAllSlicesHeld,
                  "slice '" + slice_id + "' is held by '" + slice.holder + "'");
        }
        if (slice.locked) raise(Errc::TokenLocked, "slice '" + slice_id + "'");
    }
    for (const std::string& slice_id : asset.slice_ids) {
        registry.set_pooled(slice_id, true);
    }

    auto [it, inserted] = pools_.emplace(
        asset_id,
        LiquidityPool(asset_id, asset.slice_ids, virtual_reserve, last_slice_premium));
    pool_order_.push_back(asset_id);
    return it->second;
}

LiquidityPool::BuyResult AmmMarket::buy(TokenRegistry& registry, const std::string& asset_id,
                                        const std::string& buyer, std::uint32_t q,
                                        double max_cost) {
    LiquidityPool& target = pool(asset_id);
    LiquidityPool::BuyResult result = target.buy(q, max_cost);
    const std::string seller = registry.asset(asset_id).owner;
    for (const std::string& slice_id : result.slice_ids) {
        registry.transfer(slice_id, seller, buyer);
    }
    return result;
}

LiquidityPool& AmmMarket::pool(const std::string& asset_id) {
    auto it = pools_.find(asset_id);
    if (it == pools_.end()) raise(Errc::EmptyPool, "no pool for '" + asset_id + "'");
    return it->second;
}

const LiquidityPool& AmmMarket::pool(const std::string& asset_id) const {
    auto it = pools_.find(asset_id);
    if (it == pools_.end()) raise(Errc::EmptyPool, "no pool for '" + asset_id + "'");
    return it->second;
}

} // namespace rwasim
