#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwasim/baselines.hpp"
#include "rwasim/rng.hpp"

namespace rwasim {

// Byzantine-participant model.
//
// A configured fraction of one market side is flagged malicious; the flagged
// agents then distort their behavior according to the active attack:
//   - buyer-collusion: flagged buyers depress their bids to talk prices down;
//   - seller-collusion: flagged sellers inflate their asks and withhold part
//     of their supply;
//   - default: flagged buyers refuse, with some probability, to pay after
//     receiving the resource (only possible where payment is not escrowed).

enum class AttackKind { None, BuyerCollusion, SellerCollusion, Default };

inline const char* attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::None: return "none";
        case AttackKind::BuyerCollusion: return "buyer-collusion";
        case AttackKind::SellerCollusion: return "seller-collusion";
        case AttackKind::Default: return "default";
    }
    return "none";
}

std::optional<AttackKind> parse_attack_kind(const std::string& name);

struct AttackConfig {
    AttackKind kind = AttackKind::None;
    double byzantine_ratio = 0.0;        // fraction of the attacked side, <= 0.30
    double bid_depression_factor = 0.5;  // multiplies flagged bids
    double ask_inflation_factor = 2.0;   // multiplies flagged asks
    double supply_withholding = 0.5;     // multiplies flagged quantities (floored)
    double default_probability = 0.7;    // per-trade refusal chance
};

// Flags floor(ratio * n) of n agents, chosen uniformly via `rng`.
// Ratios outside [0, 0.30] are refused.
std::vector<bool> flag_malicious(std::size_t n_agents, double ratio, Rng& rng);

// Book distortions.  `flags` indexes the respective book side.
void apply_buyer_collusion(std::vector<Bid>& bids, const std::vector<bool>& flags,
                           const AttackConfig& config);
void apply_seller_collusion(std::vector<Ask>& asks, const std::vector<bool>& flags,
                            const AttackConfig& config);

// Post-trade refusal draws for pay-after-delivery settlement: entry i tells
// whether trade i defaults.  Only trades whose buyer is flagged can default.
std::vector<bool> draw_defaults(const std::vector<Trade>& trades,
                                const std::vector<std::string>& buyer_ids,
                                const std::vector<bool>& buyer_flags,
                                const AttackConfig& config, Rng& rng);

} // namespace rwasim
