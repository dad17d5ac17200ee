#include "rwasim/adversary.hpp"

#include <cmath>

#include "rwasim/errors.hpp"

namespace rwasim {

std::optional<AttackKind> parse_attack_kind(const std::string& name) {
    if (name == "none") return AttackKind::None;
    if (name == "buyer-collusion") return AttackKind::BuyerCollusion;
    if (name == "seller-collusion") return AttackKind::SellerCollusion;
    if (name == "default") return AttackKind::Default;
    return std::nullopt;
}

std::vector<bool> flag_malicious(std::size_t n_agents, double ratio, Rng& rng) {
    if (ratio < 0.0 || ratio > 0.30 + 1e-12) {
        raise(Errc::RatioOutOfRange,
              "byzantine ratio " + std::to_string(ratio) + " outside [0, 0.30]");
    }
    const std::size_t flagged =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n_agents)));
    std::vector<std::size_t> order(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<bool> flags(n_agents, false);
    for (std::size_t i = 0; i < flagged; ++i) flags[order[i]] = true;
    return flags;
}

void apply_buyer_collusion(std::vector<Bid>& bids, const std::vector<bool>& flags,
                           const AttackConfig& config) {
    for (std::size_t i = 0; i < bids.size() && i < flags.size(); ++i) {
        if (flags[i]) bids[i].price *= config.bid_depression_factor;
    }
}

void apply_seller_collusion(std::vector<Ask>& asks, const std::vector<bool>& flags,
                            const AttackConfig& config) {
    for (std::size_t i = 0; i < asks.size() && i < flags.size(); ++i) {
        if (!flags[i]) continue;
        asks[i].price *= config.ask_inflation_factor;
        asks[i].quantity = static_cast<std::uint32_t>(std::floor(
            static_cast<double>(asks[i].quantity) * config.supply_withholding));
    }
}

std::vector<bool> draw_defaults(const std::vector<Trade>& trades,
                                const std::vector<std::string>& buyer_ids,
                                const std::vector<bool>& buyer_flags,
                                const AttackConfig& config, Rng& rng) {
    std::vector<bool> defaults(trades.size(), false);
    for (std::size_t i = 0; i < trades.size(); ++i) {
        bool flagged = false;
        for (std::size_t b = 0; b < buyer_ids.size() && b < buyer_flags.size(); ++b) {
            if (buyer_flags[b] && buyer_ids[b] == trades[i].buyer) {
                flagged = true;
                break;
            }
        }
        if (flagged && rng.uniform() < config.default_probability) defaults[i] = true;
    }
    return defaults;
}

} // namespace rwasim
