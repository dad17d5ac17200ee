#include "rwasim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "rwasim/currency.hpp"
#include "rwasim/errors.hpp"

namespace rwasim {

std::optional<Scheme> parse_scheme(const std::string& name) {
    if (name == "rwa") return Scheme::Rwa;
    if (name == "mpra") return Scheme::Mpra;
    if (name == "tra") return Scheme::Tra;
    if (name == "cpa") return Scheme::Cpa;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& what) { raise(Errc::ConfigInvalid, what); };
    if (n_buyers < 1) bad("n_buyers must be >= 1");
    if (n_sellers < 1) bad("n_sellers must be >= 1");
    if (buyer_demand_slices < 1) bad("buyer_demand_slices must be >= 1");
    if (slices_per_asset < 1) bad("slices_per_asset must be >= 1");
    if (ticks < 1) bad("ticks must be >= 1");
    if (baseline_round_ticks < 1) bad("baseline_round_ticks must be >= 1");
    if (stall_ticks_stop < 1) bad("stall_ticks_stop must be >= 1");
    if (!(valuation_lo > 0) || !(valuation_hi >= valuation_lo)) {
        bad("valuation range must satisfy 0 < lo <= hi");
    }
    if (!(cost_lo > 0) || !(cost_hi >= cost_lo)) bad("cost range must satisfy 0 < lo <= hi");
    if (holdout_share < 0 || holdout_share > 1) bad("holdout_share must lie in [0, 1]");
    if (!(holdout_cost_lo > 0) || !(holdout_cost_hi >= holdout_cost_lo)) {
        bad("holdout cost range must satisfy 0 < lo <= hi");
    }
    if (!(pool_target_revenue > 0)) bad("pool_target_revenue must be positive");
    if (!(last_slice_premium > 0)) bad("last_slice_premium must be positive");
    if (cpa_income < 0) bad("cpa_income must be non-negative");
    if (ledger.block_size < 1) bad("block_size must be >= 1");
    if (ledger.block_timeout_s < 1) bad("block_timeout_s must be >= 1");
    if (attack.byzantine_ratio < 0.0 || attack.byzantine_ratio > 0.30 + 1e-12) {
        raise(Errc::RatioOutOfRange,
              "byzantine_ratio " + std::to_string(attack.byzantine_ratio));
    }
    if (!(attack.bid_depression_factor > 0)) bad("bid_depression_factor must be positive");
    if (!(attack.ask_inflation_factor > 0)) bad("ask_inflation_factor must be positive");
    if (attack.supply_withholding < 0 || attack.supply_withholding > 1) {
        bad("supply_withholding must lie in [0, 1]");
    }
    if (attack.default_probability < 0 || attack.default_probability > 1) {
        bad("default_probability must lie in [0, 1]");
    }
}

std::uint64_t run_seed_for(std::uint64_t seed_base, Scheme scheme, std::uint32_t seed_idx) {
    return mix_seed(seed_base, static_cast<std::uint64_t>(scheme) + 1, seed_idx);
}

namespace {

struct BuyerState {
    std::string account;
    double valuation = 0;
    std::uint32_t slices_left = 0;    // slice-market demand
    std::uint32_t licenses_left = 0;  // whole-license demand
    bool flagged = false;
};

struct SellerState {
    std::string account;
    std::string asset_id;
    double cost = 0;
    bool sold = false;      // license delivered
    bool reverted = false;  // delivered but payment refused; resource wasted
    bool flagged = false;
};

class Simulation {
  public:
    Simulation(const ExperimentConfig& config, Scheme scheme, std::uint64_t seed)
        : cfg_(config),
          scheme_(scheme),
          rng_(seed),
          ledger_(config.ledger),
          cpa_(config.cpa_virtual_nodes, to_micros_round(config.cpa_income)) {}

    MetricsRecord run(const std::string& sweep_param, double sweep_value,
                      std::uint64_t seed, ChainTrace* trace) {
        populate();
        for (std::uint32_t tick = 1; tick <= cfg_.ticks; ++tick) {
            const std::uint64_t before = trades_;
            if (scheme_ == Scheme::Rwa) {
                pool_tick();
            } else if (tick % cfg_.baseline_round_ticks == 0) {
                baseline_round();
            }
            ledger_.advance_time(tick);
            if (supply_exhausted()) break;
            stall_ = (trades_ == before) ? stall_ + 1 : 0;
            if (stall_ >= cfg_.stall_ticks_stop) break;
        }
        if (trace != nullptr) {
            trace->blocks = ledger_.blocks();
            trace->rejections = ledger_.rejections();
            trace->total_submitted = ledger_.total_submitted();
            trace->total_minted = ledger_.total_minted();
            trace->final_balances = ledger_.sum_balances();
            trace->final_locked = ledger_.sum_locked();
        }
        return report(sweep_param, sweep_value, seed);
    }

  private:
    // --- setup --------------------------------------------------------------

    void populate() {
        const std::uint32_t n_holdout = static_cast<std::uint32_t>(
            cfg_.holdout_share * static_cast<double>(cfg_.n_sellers));
        const std::uint32_t n_regular = cfg_.n_sellers - n_holdout;
        sellers_.reserve(cfg_.n_sellers);
        for (std::uint32_t i = 0; i < cfg_.n_sellers; ++i) {
            SellerState s;
            s.account = "s" + std::to_string(i);
            s.asset_id = "a" + std::to_string(i);
            s.cost = i < n_regular ? rng_.uniform(cfg_.cost_lo, cfg_.cost_hi)
                                   : rng_.uniform(cfg_.holdout_cost_lo, cfg_.holdout_cost_hi);
            ledger_.register_account(s.account);
            registry_.register_asset(s.asset_id, s.account, 10.0, 3.5);
            registry_.fractionalize(s.asset_id, s.account, cfg_.slices_per_asset);
            sellers_.push_back(std::move(s));
        }

        const std::uint32_t licenses =
            (cfg_.buyer_demand_slices + cfg_.slices_per_asset - 1) / cfg_.slices_per_asset;
        buyers_.reserve(cfg_.n_buyers);
        for (std::uint32_t j = 0; j < cfg_.n_buyers; ++j) {
            BuyerState b;
            b.account = "b" + std::to_string(j);
            b.valuation = rng_.uniform(cfg_.valuation_lo, cfg_.valuation_hi);
            b.slices_left = cfg_.buyer_demand_slices;
            b.licenses_left = licenses;
            ledger_.register_account(b.account);
            const double budget = static_cast<double>(cfg_.buyer_demand_slices) * b.valuation;
            ledger_.mint(b.account, to_micros_round(budget));
            buyers_.push_back(std::move(b));
            if (scheme_ == Scheme::Cpa) {
                cpa_.set_budget(buyers_.back().account, ledger_.balance(buyers_.back().account));
            }
        }

        draw_flags();

        if (scheme_ == Scheme::Rwa) {
            // Sellers pre-commit their whole inventory to on-chain pools, so
            // later book distortions and payment refusals have no lever here.
            const double n = static_cast<double>(cfg_.slices_per_asset);
            const double depth = n - 1.0 + cfg_.last_slice_premium * n / 2.0;
            const double v0 = cfg_.pool_target_revenue / depth;
            pools_.reserve(sellers_.size());
            for (const SellerState& s : sellers_) {
                amm_.create_pool(registry_, s.asset_id, s.account, v0,
                                 cfg_.last_slice_premium);
            }
            for (const SellerState& s : sellers_) {
                LiquidityPool& pool = amm_.pool(s.asset_id);
                pools_.push_back(&pool);
                total_inventory_ += pool.inventory();
            }
            scan_order_.resize(sellers_.size());
            for (std::uint32_t i = 0; i < sellers_.size(); ++i) scan_order_[i] = i;
            pos_of_ = scan_order_;
        }
    }

    // Flag the attacked side of the book.  The pool market has no book, so no
    // flags are drawn for it and its runs are identical under every attack.
    void draw_flags() {
        if (scheme_ == Scheme::Rwa || cfg_.attack.kind == AttackKind::None) return;
        const bool on_sellers = cfg_.attack.kind == AttackKind::SellerCollusion;
        const std::size_t side = on_sellers ? sellers_.size() : buyers_.size();
        const std::size_t n_flag = static_cast<std::size_t>(
            cfg_.attack.byzantine_ratio * static_cast<double>(side));
        if (n_flag == 0) return;  // keeps ratio-0 runs identical to attack-free ones
        std::vector<bool> flags = flag_malicious(side, cfg_.attack.byzantine_ratio, rng_);
        for (std::size_t i = 0; i < side; ++i) {
            if (on_sellers) {
                sellers_[i].flagged = flags[i];
            } else {
                buyers_[i].flagged = flags[i];
            }
        }
    }

    // --- pool market --------------------------------------------------------

    std::pair<std::uint64_t, std::uint32_t> scan_key(std::uint32_t idx) const {
        const std::uint32_t inv = pools_[idx]->inventory();
        return {inv == 0 ? std::numeric_limits<std::uint64_t>::max() : inv, idx};
    }

    // Keeps `scan_order_` sorted by (inventory, creation index) with drained
    // pools sunk to the back, so the front is always the depletion frontier.
    void reposition(std::uint32_t idx) {
        std::uint32_t pos = pos_of_[idx];
        while (pos > 0 && scan_key(scan_order_[pos - 1]) > scan_key(scan_order_[pos])) {
            std::swap(scan_order_[pos - 1], scan_order_[pos]);
            pos_of_[scan_order_[pos]] = pos;
            pos_of_[scan_order_[pos - 1]] = pos - 1;
            --pos;
        }
        while (pos + 1 < scan_order_.size() &&
               scan_key(scan_order_[pos + 1]) < scan_key(scan_order_[pos])) {
            std::swap(scan_order_[pos + 1], scan_order_[pos]);
            pos_of_[scan_order_[pos]] = pos;
            pos_of_[scan_order_[pos + 1]] = pos + 1;
            ++pos;
        }
    }

    void pool_tick() {
        if (total_inventory_ == 0) return;
        active_.clear();
        for (std::uint32_t j = 0; j < buyers_.size(); ++j) {
            if (buyers_[j].slices_left > 0) active_.push_back(j);
        }
        rng_.shuffle(active_);
        for (std::uint32_t j : active_) {
            if (total_inventory_ == 0) break;
            buy_one_slice(buyers_[j]);
        }
    }

    // One buyer, one slice: walk the depletion frontier and take the first
    // slice the remaining balance covers.  Spilling past an unaffordable
    // expensive tail keeps cheap fresh inventory moving.
    void buy_one_slice(BuyerState& buyer) {
        const Amount balance = ledger_.balance(buyer.account);
        for (std::uint32_t pos = 0; pos < scan_order_.size(); ++pos) {
            const std::uint32_t idx = scan_order_[pos];
            LiquidityPool& pool = *pools_[idx];
            if (pool.inventory() == 0) break;  // drained pools are sorted last
            const double cost = pool.quote_buy(1);
            const Amount micros = to_micros_ceil(cost);
            if (micros > balance) continue;

            const SellerState& seller = sellers_[idx];
            const std::string escrow_id = "e" + std::to_string(next_escrow_++);
            Tx lock;
            lock.id = "t" + std::to_string(next_tx_++);
            lock.kind = TxKind::EscrowLock;
            lock.from = buyer.account;
            lock.to = seller.account;
            lock.amount = micros;
            lock.escrow_id = escrow_id;
            ledger_.submit_tx(std::move(lock));

            Tx settle;
            settle.id = "t" + std::to_string(next_tx_++);
            settle.kind = TxKind::PoolTrade;
            settle.from = buyer.account;
            settle.to = seller.account;
            settle.amount = micros;
            settle.escrow_id = escrow_id;
            settle.memo = seller.asset_id;
            ledger_.submit_tx(std::move(settle));

            amm_.buy(registry_, seller.asset_id, buyer.account, 1);
            buyer.slices_left -= 1;
            --total_inventory_;
            ++trades_;
            price_sum_ += cost;
            reposition(idx);
            return;
        }
    }

    // --- book markets -------------------------------------------------------

    void baseline_round() {
        std::vector<Bid> bids;
        std::vector<bool> bid_flags;
        for (const BuyerState& b : buyers_) {
            if (b.licenses_left == 0) continue;
            const double per_license =
                b.valuation * static_cast<double>(std::min(cfg_.slices_per_asset,
                                                           cfg_.buyer_demand_slices));
            bids.push_back({b.account, per_license, b.licenses_left});
            bid_flags.push_back(b.flagged);
        }
        std::vector<Ask> asks;
        std::vector<bool> ask_flags;
        for (const SellerState& s : sellers_) {
            if (s.sold || s.reverted) continue;
            asks.push_back(
                {s.account, s.cost * static_cast<double>(cfg_.slices_per_asset), 1});
            ask_flags.push_back(s.flagged);
        }

        if (cfg_.attack.kind == AttackKind::BuyerCollusion) {
            apply_buyer_collusion(bids, bid_flags, cfg_.attack);
        } else if (cfg_.attack.kind == AttackKind::SellerCollusion) {
            apply_seller_collusion(asks, ask_flags, cfg_.attack);
        }

        std::vector<Trade> round_trades;
        switch (scheme_) {
            case Scheme::Mpra: round_trades = mpra_round(bids, asks).trades; break;
            case Scheme::Tra: round_trades = tra_round(bids, asks).trades; break;
            case Scheme::Cpa: round_trades = cpa_.run_round(bids, asks).trades; break;
            case Scheme::Rwa: return;
        }
        if (round_trades.empty()) return;

        std::vector<bool> defaulted(round_trades.size(), false);
        if (cfg_.attack.kind == AttackKind::Default && scheme_ != Scheme::Cpa) {
            std::vector<std::string> buyer_ids;
            std::vector<bool> buyer_flags;
            buyer_ids.reserve(buyers_.size());
            buyer_flags.reserve(buyers_.size());
            for (const BuyerState& b : buyers_) {
                buyer_ids.push_back(b.account);
                buyer_flags.push_back(b.flagged);
            }
            defaulted = draw_defaults(round_trades, buyer_ids, buyer_flags, cfg_.attack, rng_);
        }

        for (std::size_t t = 0; t < round_trades.size(); ++t) {
            settle_license_trade(round_trades[t], defaulted[t]);
        }
    }

    void settle_license_trade(const Trade& trade, bool defaulted) {
        BuyerState& buyer = buyer_by_account(trade.buyer);
        SellerState& seller = seller_by_account(trade.seller);
        buyer.licenses_left -= std::min(buyer.licenses_left, trade.quantity);
        trades_ += trade.quantity;
        price_sum_ += trade.unit_price * static_cast<double>(trade.quantity);

        if (defaulted) {
            // Pay-after-delivery: the license is gone, the payment never
            // arrives, and the wasted asset leaves the sold tally for good.
            seller.reverted = true;
            ++defaults_;
            return;
        }
        seller.sold = true;
        const double total = trade.unit_price * static_cast<double>(trade.quantity);
        if (scheme_ == Scheme::Cpa) {
            // Consortium trades settle through ledger escrow, so a refusal to
            // pay after delivery is impossible by construction.
            const Amount micros =
                to_micros_ceil(trade.unit_price) * static_cast<Amount>(trade.quantity);
            const std::string escrow_id = "e" + std::to_string(next_escrow_++);
            Tx lock;
            lock.id = "t" + std::to_string(next_tx_++);
            lock.kind = TxKind::EscrowLock;
            lock.from = buyer.account;
            lock.to = seller.account;
            lock.amount = micros;
            lock.escrow_id = escrow_id;
            ledger_.submit_tx(std::move(lock));
            Tx release;
            release.id = "t" + std::to_string(next_tx_++);
            release.kind = TxKind::EscrowRelease;
            release.from = buyer.account;
            release.to = seller.account;
            release.escrow_id = escrow_id;
            ledger_.submit_tx(std::move(release));
        } else {
            ledger_.apply_settlement(buyer.account, seller.account, to_micros_round(total));
        }
    }

    BuyerState& buyer_by_account(const std::string& account) {
        // ids are "b<index>"
        return buyers_[static_cast<std::size_t>(std::stoul(account.substr(1)))];
    }
    SellerState& seller_by_account(const std::string& account) {
        return sellers_[static_cast<std::size_t>(std::stoul(account.substr(1)))];
    }

    bool supply_exhausted() const {
        if (scheme_ == Scheme::Rwa) return total_inventory_ == 0;
        for (const SellerState& s : sellers_) {
            if (!s.sold && !s.reverted) return false;
        }
        return true;
    }

    // --- reporting ----------------------------------------------------------

    MetricsRecord report(const std::string& sweep_param, double sweep_value,
                         std::uint64_t seed) const {
        MetricsRecord rec;
        rec.scheme = scheme_name(scheme_);
        rec.sweep_param = sweep_param;
        rec.sweep_value = sweep_value;
        rec.seed = seed;
        rec.trades = static_cast<std::uint32_t>(trades_);
        rec.defaults_observed = static_cast<std::uint32_t>(defaults_);
        rec.mean_price = trades_ > 0 ? price_sum_ / static_cast<double>(trades_) : 0.0;

        std::uint32_t fully = 0;
        std::uint32_t leftover = 0;
        if (scheme_ == Scheme::Rwa) {
            for (const SellerState& s : sellers_) {
                const std::size_t sold = registry_.slices_sold(s.asset_id);
                if (sold == cfg_.slices_per_asset) {
                    ++fully;
                } else if (sold > 0) {
                    leftover += cfg_.slices_per_asset - static_cast<std::uint32_t>(sold);
                }
            }
        } else {
            for (const SellerState& s : sellers_) {
                if (s.sold && !s.reverted) ++fully;
            }
        }
        rec.utilization = static_cast<double>(fully) / static_cast<double>(cfg_.n_sellers);
        rec.leftover_fragments = leftover;
        return rec;
    }

    const ExperimentConfig& cfg_;
    Scheme scheme_;
    Rng rng_;
    Ledger ledger_;
    TokenRegistry registry_;
    AmmMarket amm_;
    CpaAuction cpa_;

    std::vector<BuyerState> buyers_;
    std::vector<SellerState> sellers_;
    std::vector<LiquidityPool*> pools_;      // by seller index
    std::vector<std::uint32_t> scan_order_;  // pool indices, most depleted first
    std::vector<std::uint32_t> pos_of_;      // inverse of scan_order_
    std::vector<std::uint32_t> active_;

    std::uint64_t total_inventory_ = 0;
    std::uint64_t trades_ = 0;
    std::uint64_t defaults_ = 0;
    double price_sum_ = 0;
    std::uint32_t stall_ = 0;
    std::uint64_t next_tx_ = 0;
    std::uint64_t next_escrow_ = 0;
};

SweepPoint aggregate(std::vector<MetricsRecord> records, const std::string& scheme,
                     const std::string& sweep_param, double sweep_value,
                     AttackKind attack) {
    SweepPoint pt;
    pt.scheme = scheme;
    pt.sweep_param = sweep_param;
    pt.sweep_value = sweep_value;
    pt.attack_kind = attack_kind_name(attack);
    pt.n_seeds = static_cast<std::uint32_t>(records.size());
    double util = 0, leftover = 0, defaults = 0;
    for (const MetricsRecord& r : records) {
        util += r.utilization;
        leftover += r.leftover_fragments;
        defaults += r.defaults_observed;
    }
    const double n = static_cast<double>(records.size());
    if (!records.empty()) {
        pt.utilization_mean = util / n;
        pt.leftover_mean = leftover / n;
        pt.defaults_mean = defaults / n;
        if (records.size() > 1) {
            double ss = 0;
            for (const MetricsRecord& r : records) {
                const double d = r.utilization - pt.utilization_mean;
                ss += d * d;
            }
            pt.utilization_std = std::sqrt(ss / (n - 1.0));
        }
    }
    pt.records = std::move(records);
    return pt;
}

} // namespace

MetricsRecord run_experiment(const ExperimentConfig& config, Scheme scheme,
                             std::uint64_t run_seed, const std::string& sweep_param,
                             double sweep_value, ChainTrace* trace) {
    config.validate();
    Simulation sim(config, scheme, run_seed);
    return sim.run(sweep_param, sweep_value, run_seed, trace);
}

std::vector<SweepPoint> sweep_buyers(const ExperimentConfig& base,
                                     const std::vector<Scheme>& schemes,
                                     std::uint32_t from, std::uint32_t to,
                                     std::uint32_t step, std::uint32_t seeds,
                                     std::uint64_t seed_base) {
    if (from < 1 || to < from || step < 1) {
        raise(Errc::ConfigInvalid, "buyer sweep range must satisfy 1 <= from <= to, step >= 1");
    }
    if (seeds < 1) raise(Errc::ConfigInvalid, "seeds must be >= 1");
    std::vector<SweepPoint> points;
    for (Scheme scheme : schemes) {
        for (std::uint64_t value = from; value <= to; value += step) {
            std::vector<MetricsRecord> records;
            records.reserve(seeds);
            for (std::uint32_t s = 0; s < seeds; ++s) {
                ExperimentConfig cfg = base;
                cfg.n_buyers = static_cast<std::uint32_t>(value);
                records.push_back(run_experiment(cfg, scheme, run_seed_for(seed_base, scheme, s),
                                                 "n_buyers", static_cast<double>(value)));
            }
            points.push_back(aggregate(std::move(records), scheme_name(scheme), "n_buyers",
                                       static_cast<double>(value), base.attack.kind));
        }
    }
    return points;
}

std::vector<SweepPoint> sweep_byzantine(const ExperimentConfig& base,
                                        const std::vector<Scheme>& schemes,
                                        AttackKind attack,
                                        const std::vector<double>& ratios,
                                        std::uint32_t seeds, std::uint64_t seed_base) {
    if (ratios.empty()) raise(Errc::ConfigInvalid, "ratio list must not be empty");
    if (seeds < 1) raise(Errc::ConfigInvalid, "seeds must be >= 1");
    std::vector<SweepPoint> points;
    for (Scheme scheme : schemes) {
        for (double ratio : ratios) {
            std::vector<MetricsRecord> records;
            records.reserve(seeds);
            for (std::uint32_t s = 0; s < seeds; ++s) {
                ExperimentConfig cfg = base;
                cfg.attack.kind = attack;
                cfg.attack.byzantine_ratio = ratio;
                records.push_back(run_experiment(cfg, scheme, run_seed_for(seed_base, scheme, s),
                                                 "byzantine_ratio", ratio));
            }
            points.push_back(aggregate(std::move(records), scheme_name(scheme),
                                       "byzantine_ratio", ratio, attack));
        }
    }
    return points;
}

std::vector<SweepPoint> run_configured(const ExperimentConfig& base,
                                       const std::vector<Scheme>& schemes,
                                       std::uint32_t seeds, std::uint64_t seed_base) {
    if (seeds < 1) raise(Errc::ConfigInvalid, "seeds must be >= 1");
    std::vector<SweepPoint> points;
    for (Scheme scheme : schemes) {
        std::vector<MetricsRecord> records;
        records.reserve(seeds);
        for (std::uint32_t s = 0; s < seeds; ++s) {
            records.push_back(run_experiment(base, scheme, run_seed_for(seed_base, scheme, s),
                                             "none", 0.0));
        }
        points.push_back(
            aggregate(std::move(records), scheme_name(scheme), "none", 0.0, base.attack.kind));
    }
    return points;
}

} // namespace rwasim
