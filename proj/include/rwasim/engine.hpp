#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwasim/adversary.hpp"
#include "rwasim/amm.hpp"
#include "rwasim/baselines.hpp"
#include "rwasim/ledger.hpp"
#include "rwasim/rng.hpp"
#include "rwasim/tokenization.hpp"

namespace rwasim {

// Agent-based market simulation.
//
// One run populates `n_sellers` sellers (each owning one fractionalized
// 10 MHz asset) and `n_buyers` buyers (each demanding `buyer_demand_slices`
// slices with budget = demand x valuation, minted as ledger balance), then
// advances the ledger clock one second per tick while the chosen allocation
// scheme trades:
//
//   - rwa:  every asset is listed in a constant-product pool up front.  Each
//           tick the active buyers, in seeded random order, buy one slice
//           from the most-depleted pool whose next slice they can afford
//           (spilling to fresher pools keeps expensive tail slices from
//           blocking everyone).  Payment goes through ledger escrow.
//   - mpra/tra: every `baseline_round_ticks` ticks the whole-license book
//           clears (rank matching / sequential split); settlement is
//           pay-after-delivery, so flagged buyers can take the license and
//           refuse payment.
//   - cpa:  anchored consortium double auction with per-buyer budget
//           carryover; trades settle through ledger escrow.
//
// Malicious agents distort books (collusion) or default (pay-after-delivery
// only) per AttackConfig.  Runs stop early once supply is exhausted or no
// trade has happened for `stall_ticks_stop` consecutive ticks.

enum class Scheme { Rwa, Mpra, Tra, Cpa };

inline const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Rwa: return "rwa";
        case Scheme::Mpra: return "mpra";
        case Scheme::Tra: return "tra";
        case Scheme::Cpa: return "cpa";
    }
    return "rwa";
}

std::optional<Scheme> parse_scheme(const std::string& name);

struct ExperimentConfig {
    // population
    std::uint32_t n_buyers = 200;
    std::uint32_t n_sellers = 100;
    std::uint32_t buyer_demand_slices = 50;
    std::uint32_t slices_per_asset = 100;

    // time
    std::uint32_t ticks = 600;               // one simulated second each
    std::uint32_t baseline_round_ticks = 5;  // book clears once per block interval
    std::uint32_t stall_ticks_stop = 10;

    // economics (currency per slice unless noted)
    double valuation_lo = 1.61;
    double valuation_hi = 1.83;
    double cost_lo = 0.40;
    double cost_hi = 0.70;
    // A fixed share of sellers are holdouts: they list their licenses at
    // reserve prices no buyer can meet, so book markets can never place that
    // part of the supply (the pool market is unaffected; its listing terms
    // are set by pool depth, not by the seller's reserve price).
    double holdout_share = 0.30;
    double holdout_cost_lo = 1.10;
    double holdout_cost_hi = 1.50;
    double pool_target_revenue = 99.0;  // currency collected by one fully drained pool
    double last_slice_premium = 2.0;

    // consortium auction
    std::uint32_t cpa_virtual_nodes = 5;
    double cpa_income = 0.0;  // currency per round

    // ledger
    LedgerParams ledger;

    // adversary
    AttackConfig attack;

    void validate() const;  // throws ConfigInvalid / RatioOutOfRange
};

struct MetricsRecord {
    std::string scheme;
    std::string sweep_param;
    double sweep_value = 0;
    std::uint64_t seed = 0;
    double utilization = 0;               // fully sold assets / assets
    std::uint32_t trades = 0;             // executed unit trades (slices or licenses)
    std::uint32_t defaults_observed = 0;  // refused payments after delivery
    std::uint32_t leftover_fragments = 0; // unsold slices in partially sold assets
    double mean_price = 0;                // mean executed unit price
};

// Ledger trace of one run, for chain dumps and audits.
struct ChainTrace {
    std::vector<Block> blocks;
    std::vector<Rejection> rejections;
    std::uint64_t total_submitted = 0;
    Amount total_minted = 0;
    Amount final_balances = 0;
    Amount final_locked = 0;
};

// One deterministic run: same (config, scheme, seed) -> identical record.
// When `trace` is given it receives the run's ledger history.
MetricsRecord run_experiment(const ExperimentConfig& config, Scheme scheme,
                             std::uint64_t run_seed, const std::string& sweep_param,
                             double sweep_value, ChainTrace* trace = nullptr);

// Aggregates for one sweep cell.
struct SweepPoint {
    std::string scheme;
    std::string sweep_param;
    double sweep_value = 0;
    std::string attack_kind;
    double utilization_mean = 0;
    double utilization_std = 0;  // sample standard deviation (n - 1)
    std::uint32_t n_seeds = 0;
    double leftover_mean = 0;
    double defaults_mean = 0;
    std::vector<MetricsRecord> records;
};

// Buyer-count sweep at fixed sellers, all requested schemes.  Runs are
// ordered by (scheme, value, seed); the per-run seed depends only on
// (seed_base, scheme, seed index) so overlapping cells of different sweeps
// reproduce each other exactly.
std::vector<SweepPoint> sweep_buyers(const ExperimentConfig& base,
                                     const std::vector<Scheme>& schemes,
                                     std::uint32_t from, std::uint32_t to,
                                     std::uint32_t step, std::uint32_t seeds,
                                     std::uint64_t seed_base);

// Byzantine-ratio sweep at a fixed attack kind.
std::vector<SweepPoint> sweep_byzantine(const ExperimentConfig& base,
                                        const std::vector<Scheme>& schemes,
                                        AttackKind attack,
                                        const std::vector<double>& ratios,
                                        std::uint32_t seeds, std::uint64_t seed_base);

// Fixed-config runs over `seeds` seeds (one sweep point per scheme).
std::vector<SweepPoint> run_configured(const ExperimentConfig& base,
                                       const std::vector<Scheme>& schemes,
                                       std::uint32_t seeds, std::uint64_t seed_base);

std::uint64_t run_seed_for(std::uint64_t seed_base, Scheme scheme, std::uint32_t seed_idx);

} // namespace rwasim
