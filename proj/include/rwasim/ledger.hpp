#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rwasim/currency.hpp"
#include "rwasim/errors.hpp"

namespace rwasim {

// Permissioned settlement ledger with a simulated integer-second clock.
//
// Transactions enter a mempool and are sealed into blocks either immediately
// when the mempool reaches `block_size`, or at the next timeout boundary.
// Boundaries tick every `block_timeout_s` seconds measured from the last seal
// event (an empty boundary advances the anchor without producing a block), so
// no accepted transaction waits longer than one timeout.
//
// Money effects are split by kind:
//   - mint, escrow-lock/release/refund, channel-op: applied when accepted
//     (lock debits the payer up front, so funds are reserved immediately);
//   - transfer and pool-trade: applied at block inclusion.  A transfer whose
//     sender cannot cover it at inclusion time is dropped from the block and
//     recorded as a rejection rather than aborting the seal.
//
// Conservation invariant maintained at every point in time:
//   sum(balances) + sum(locked escrow amounts) == sum(minted).

struct LedgerParams {
    std::size_t block_size = 10;
    long long block_timeout_s = 5;
};

enum class TxKind {
    Transfer,
    Mint,
    EscrowLock,
    EscrowRelease,
    EscrowRefund,
    PoolTrade,
    ChannelOp,
};

struct Tx {
    std::string id;
    TxKind kind = TxKind::Transfer;
    std::string from;       // sender; must be a registered, verified account
    std::string to;         // recipient / escrow payee
    Amount amount = 0;      // micro-units
    std::string escrow_id;  // escrow ops and pool-trade settlement
    std::string memo;       // free-form tag (channel op name, trade details)
    long long submitted_at = 0;  // stamped by the ledger
};

struct Block {
    std::uint64_t height = 0;
    long long sealed_at = 0;
    std::vector<std::string> tx_ids;  // transactions actually applied
};

enum class EscrowState { Locked, Released, Refunded };

struct Escrow {
    std::string id;
    std::string payer;
    std::string payee;
    Amount amount = 0;
    EscrowState state = EscrowState::Locked;
};

struct Rejection {
    std::string tx_id;
    Errc reason = Errc::InsufficientBalance;
    long long at = 0;
};

class Ledger {
  public:
    explicit Ledger(LedgerParams params = {});

    // --- accounts & supply -------------------------------------------------
    void register_account(const std::string& id, bool verified = true);
    bool account_exists(const std::string& id) const;
    void set_verified(const std::string& id, bool verified);
    void mint(const std::string& account, Amount amount);
    Amount balance(const std::string& id) const;

    // --- transactions ------------------------------------------------------
    // Validates, stamps, applies eager effects, enqueues, and seals a block
    // immediately if the mempool is now full.  Returns the transaction id.
    const std::string& submit_tx(Tx tx);

    // Advance the clock to `t` (monotone), sealing at every timeout boundary
    // crossed on the way.
    void advance_time(long long t);
    long long now() const { return now_; }

    // Executes the deferred money effect of an already-included transaction
    // (e.g. a channel settlement whose dispute window just closed).  Not a new
    // submission; conservation is preserved.
    void apply_settlement(const std::string& from, const std::string& to, Amount amount);

    // --- queries -----------------------------------------------------------
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Rejection>& rejections() const { return rejections_; }
    std::size_t pending_count() const { return mempool_.size(); }
    std::uint64_t total_submitted() const { return total_submitted_; }
    const Escrow& escrow(const std::string& id) const;
    bool escrow_exists(const std::string& id) const;
    const Tx& tx(const std::string& id) const;

    // --- conservation ------------------------------------------------------
    Amount total_minted() const { return total_minted_; }
    Amount sum_balances() const;
    Amount sum_locked() const;
    bool conservation_holds() const {
        return sum_balances() + sum_locked() == total_minted();
    }

  private:
    struct Account {
        Amount balance = 0;
        bool verified = true;
    };

    Account& require_account(const std::string& id);
    const Account& require_account(const std::string& id) const;
    void apply_eager_effects(const Tx& tx);
    void seal_block(long long at);

    LedgerParams params_;
    long long now_ = 0;
    long long seal_anchor_ = 0;  // time of the last seal event / boundary

    std::unordered_map<std::string, Account> accounts_;
    std::unordered_map<std::string, Escrow> escrows_;
    std::unordered_map<std::string, Tx> txs_;
    std::vector<std::string> mempool_;
    std::vector<Block> blocks_;
    std::vector<Rejection> rejections_;
    Amount total_minted_ = 0;
    std::uint64_t total_submitted_ = 0;
};

} // namespace rwasim
