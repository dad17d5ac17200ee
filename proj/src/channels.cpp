#include "rwasim/channels.hpp"

#include <cmath>
#include <utility>

namespace rwasim {

ChannelManager::ChannelManager(Ledger& ledger, TokenRegistry& registry,
                               std::string protocol_account, double owner_share)
    : ledger_(ledger),
      registry_(registry),
      protocol_account_(std::move(protocol_account)),
      owner_share_(owner_share) {
    if (owner_share_ < 0.0 || owner_share_ > 1.0) {
        raise(Errc::ConfigInvalid, "owner share must lie in [0, 1]");
    }
}

Channel& ChannelManager::require_channel(const std::string& id) {
    auto it = channels_.find(id);
    if (it == channels_.end()) raise(Errc::UnknownChannel, "no channel '" + id + "'");
    return it->second;
}

const Channel& ChannelManager::channel(const std::string& id) const {
    return const_cast<ChannelManager*>(this)->require_channel(id);
}

const std::string& ChannelManager::open_channel(const std::string& owner,
                                                const std::string& lessee,
                                                const std::vector<std::string>& token_ids,
                                                long long dispute_window_s) {
    if (token_ids.empty()) raise(Errc::InvalidCount, "channel needs collateral slices");
    if (dispute_window_s < 0) raise(Errc::ConfigInvalid, "dispute window must be >= 0");
    for (const std::string& token_id : token_ids) {
        const SliceToken& token = registry_.token(token_id);
        if (token.holder != owner) {
            raise(Errc::NotHolder, "'" + owner + "' does not hold '" + token_id + "'");
        }
        if (token.locked) raise(Errc::TokensAlreadyLocked, "slice '" + token_id + "'");
    }

    Channel channel;
    channel.id = "ch" + std::to_string(next_channel_++);
    channel.owner = owner;
    channel.lessee = lessee;
    channel.token_ids = token_ids;
    channel.dispute_window_s = dispute_window_s;
    for (const std::string& token_id : token_ids) registry_.lock(token_id);

    Tx open_tx;
    open_tx.id = channel.id + "-open";
    open_tx.kind = TxKind::ChannelOp;
    open_tx.from = owner;
    open_tx.to = lessee;
    open_tx.memo = "channel-open";
    ledger_.submit_tx(open_tx);

    auto [it, inserted] = channels_.emplace(channel.id, std::move(channel));
    return it->second.id;
}

void ChannelManager::validate_update(const Channel& channel, const ChannelUpdate& update,
                                     std::uint64_t min_seq_exclusive) const {
    if (!update.attested_by_owner || !update.attested_by_lessee) {
        raise(Errc::MissingAttestation,
              "channel '" + channel.id + "' update " + std::to_string(update.seq));
    }
    if (update.seq <= min_seq_exclusive) {
        raise(Errc::StaleStateAfterFresherSubmission,
              "channel '" + channel.id + "': seq " + std::to_string(update.seq) +
                  " not above " + std::to_string(min_seq_exclusive));
    }
    if (update.payment_to_owner < 0) {
        raise(Errc::NegativePayment, "channel '" + channel.id + "'");
    }
    // The schedule must talk about collateral slices only and must not book
    // the same slice for overlapping hours.
    for (std::size_t i = 0; i < update.schedule.size(); ++i) {
        const UsagePlan& plan = update.schedule[i];
        bool collateral = false;
        for (const std::string& token_id : channel.token_ids) {
            if (token_id == plan.token_id) {
                collateral = true;
                break;
            }
        }
        if (!collateral) {
            raise(Errc::UnknownToken,
                  "'" + plan.token_id + "' is not collateral of '" + channel.id + "'");
        }
        if (plan.duration_hours < 1.0 ||
            plan.duration_hours != std::floor(plan.duration_hours)) {
            raise(Errc::SubHourDuration, "channel '" + channel.id + "'");
        }
        const long long end = plan.start_hour + static_cast<long long>(plan.duration_hours);
        for (std::size_t j = 0; j < i; ++j) {
            const UsagePlan& other = update.schedule[j];
            if (other.token_id != plan.token_id) continue;
            const long long other_end =
                other.start_hour + static_cast<long long>(other.duration_hours);
            if (plan.start_hour < other_end && other.start_hour < end) {
                raise(Errc::OverlappingRight,
                      "channel '" + channel.id + "': slice '" + plan.token_id + "'");
            }
        }
    }
}

void ChannelManager::submit_update(const std::string& channel_id,
                                   const ChannelUpdate& update) {
    Channel& channel = require_channel(channel_id);
    if (channel.phase != ChannelPhase::Open) {
        raise(Errc::ChannelNotOpen, "channel '" + channel_id + "'");
    }
    validate_update(channel, update, channel.latest ? channel.latest->seq : 0);
    channel.latest = update;
}

void ChannelManager::start_settlement(const std::string& channel_id,
                                      const std::string& caller) {
    Channel& channel = require_channel(channel_id);
    if (channel.phase != ChannelPhase::Open) {
        raise(Errc::ChannelNotOpen, "channel '" + channel_id + "'");
    }
    if (caller != channel.owner && caller != channel.lessee) {
        raise(Errc::NotHolder, "'" + caller + "' is not a party of '" + channel_id + "'");
    }

    Tx settle_tx;
    settle_tx.id = channel.id + "-settle";
    settle_tx.kind = TxKind::ChannelOp;
    settle_tx.from = caller;
    settle_tx.to = caller == channel.owner ? channel.lessee : channel.owner;
    settle_tx.memo = "channel-settle";
    ledger_.submit_tx(settle_tx);

    channel.phase = ChannelPhase::Settling;
    channel.settle_at = ledger_.now() + channel.dispute_window_s;
}

void ChannelManager::challenge(const std::string& channel_id, const ChannelUpdate& update) {
    Channel& channel = require_channel(channel_id);
    if (channel.phase != ChannelPhase::Settling) {
        raise(Errc::ChannelNotOpen, "channel '" + channel_id + "' is not settling");
    }
    if (ledger_.now() >= channel.settle_at) {
        raise(Errc::DisputeWindowOpen,
              "channel '" + channel_id + "': dispute window already closed");
    }
    validate_update(channel, update, channel.latest ? channel.latest->seq : 0);
    channel.latest = update;
}

ChannelManager::SettlementResult ChannelManager::finalize(const std::string& channel_id) {
    Channel& channel = require_channel(channel_id);
    if (channel.phase != ChannelPhase::Settling) {
        raise(Errc::ChannelNotOpen, "channel '" + channel_id + "' is not settling");
    }
    if (ledger_.now() < channel.settle_at) {
        raise(Errc::DisputeWindowOpen,
              "channel '" + channel_id + "' finalizes at t=" +
                  std::to_string(channel.settle_at));
    }

    SettlementResult result;
    if (channel.latest) {
        result.final_seq = channel.latest->seq;
        result.lessee_paid = channel.latest->payment_to_owner;
        // Integer split that always reassembles exactly.
        result.protocol_payout = static_cast<Amount>(std::llround(
            static_cast<double>(result.lessee_paid) * (1.0 - owner_share_)));
        result.owner_payout = result.lessee_paid - result.protocol_payout;
        ledger_.apply_settlement(channel.lessee, channel.owner, result.owner_payout);
        ledger_.apply_settlement(channel.lessee, protocol_account_, result.protocol_payout);
        for (const UsagePlan& plan : channel.latest->schedule) {
            registry_.grant_usage_right(plan.token_id, channel.owner, channel.lessee,
                                        plan.start_hour, plan.duration_hours);
        }
    }
    for (const std::string& token_id : channel.token_ids) registry_.unlock(token_id);
    channel.phase = ChannelPhase::Closed;
    return result;
}

} // namespace rwasim
