#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwasim/ledger.hpp"
#include "rwasim/tokenization.hpp"

namespace rwasim {

// Off-chain usage channels between a slice holder (owner) and a lessee.
//
// Opening a channel locks the collateral slices and records one on-chain
// transaction.  All subsequent usage/payment agreements are exchanged
// off-chain as doubly-attested state updates with strictly increasing
// sequence numbers — they cost no transactions.  Settlement records the
// second (and last) on-chain transaction and opens a dispute window during
// which either party may present a fresher attested state; when the window
// closes, finalization executes the latest state: the lessee pays, the agreed
// usage schedule is materialized as usage rights, and the collateral unlocks.
//
// The settlement amount splits between the slice owner and a protocol account
// according to `owner_share`; the two integer payouts always sum exactly to
// what the lessee paid.

struct UsagePlan {
    std::string token_id;
    long long start_hour = 0;
    double duration_hours = 0;  // whole hours, at least one
};

struct ChannelUpdate {
    std::uint64_t seq = 0;  // must strictly increase, starting at 1
    std::vector<UsagePlan> schedule;
    Amount payment_to_owner = 0;  // cumulative, micro-units
    bool attested_by_owner = false;
    bool attested_by_lessee = false;
};

enum class ChannelPhase { Open, Settling, Closed };

struct Channel {
    std::string id;
    std::string owner;
    std::string lessee;
    std::vector<std::string> token_ids;
    ChannelPhase phase = ChannelPhase::Open;
    std::optional<ChannelUpdate> latest;  // freshest doubly-attested state
    long long dispute_window_s = 10;
    long long settle_at = 0;  // finalization allowed from this time on
};

class ChannelManager {
  public:
    ChannelManager(Ledger& ledger, TokenRegistry& registry, std::string protocol_account,
                   double owner_share = 1.0);

    // Locks the collateral and records the opening transaction.
    const std::string& open_channel(const std::string& owner, const std::string& lessee,
                                    const std::vector<std::string>& token_ids,
                                    long long dispute_window_s = 10);

    // Off-chain: accept a fresher doubly-attested state.  No transaction.
    void submit_update(const std::string& channel_id, const ChannelUpdate& update);

    // On-chain: record the settlement transaction and start the dispute
    // window based on the current ledger clock.
    void start_settlement(const std::string& channel_id, const std::string& caller);

    // Off-chain: during the dispute window, replace the settlement candidate
    // with a strictly fresher doubly-attested state.  No transaction.
    void challenge(const std::string& channel_id, const ChannelUpdate& update);

    struct SettlementResult {
        std::uint64_t final_seq = 0;
        Amount lessee_paid = 0;
        Amount owner_payout = 0;
        Amount protocol_payout = 0;
    };

    // After the window: execute the candidate state and close the channel.
    SettlementResult finalize(const std::string& channel_id);

    const Channel& channel(const std::string& id) const;
    double owner_share() const { return owner_share_; }

  private:
    Channel& require_channel(const std::string& id);
    void validate_update(const Channel& channel, const ChannelUpdate& update,
                         std::uint64_t min_seq_exclusive) const;

    Ledger& ledger_;
    TokenRegistry& registry_;
    std::string protocol_account_;
    double owner_share_;
    std::unordered_map<std::string, Channel> channels_;
    std::uint64_t next_channel_ = 0;
};

} // namespace rwasim
