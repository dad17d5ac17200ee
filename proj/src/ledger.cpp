#include "rwasim/ledger.hpp"

#include <algorithm>

namespace rwasim {

Ledger::Ledger(LedgerParams params) : params_(params) {
    if (params_.block_size == 0) {
        raise(Errc::ConfigInvalid, "block size must be positive");
    }
    if (params_.block_timeout_s <= 0) {
        raise(Errc::ConfigInvalid, "block timeout must be positive");
    }
}

void Ledger::register_account(const std::string& id, bool verified) {
    accounts_[id] = Account{0, verified};
}

bool Ledger::account_exists(const std::string& id) const {
    return accounts_.count(id) != 0;
}

void Ledger::set_verified(const std::string& id, bool verified) {
    require_account(id).verified = verified;
}

void Ledger::mint(const std::string& account, Amount amount) {
    if (amount < 0) raise(Errc::ConfigInvalid, "mint amount must be non-negative");
    require_account(account).balance += amount;
    total_minted_ += amount;
}

Amount Ledger::balance(const std::string& id) const {
    return require_account(id).balance;
}

Ledger::Account& Ledger::require_account(const std::string& id) {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) raise(Errc::UnknownAccount, "no account '" + id + "'");
    return it->second;
}

const Ledger::Account& Ledger::require_account(const std::string& id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) raise(Errc::UnknownAccount, "no account '" + id + "'");
    return it->second;
}

const Escrow& Ledger::escrow(const std::string& id) const {
    auto it = escrows_.find(id);
    if (it == escrows_.end()) raise(Errc::InvalidEscrowState, "no escrow '" + id + "'");
    return it->second;
}

bool Ledger::escrow_exists(const std::string& id) const {
    return escrows_.count(id) != 0;
}

const Tx& Ledger::tx(const std::string& id) const {
    auto it = txs_.find(id);
    if (it == txs_.end()) raise(Errc::ConfigInvalid, "no transaction '" + id + "'");
    return it->second;
}

const std::string& Ledger::submit_tx(Tx tx) {
    if (tx.id.empty()) raise(Errc::ConfigInvalid, "transaction id must not be empty");
    if (txs_.count(tx.id)) raise(Errc::DuplicateTxId, "transaction '" + tx.id + "'");

    // Mints are treasury operations with no sender; everything else must come
    // from a registered, verified identity.
    if (tx.kind != TxKind::Mint) {
        auto it = accounts_.find(tx.from);
        if (it == accounts_.end() || !it->second.verified) {
            raise(Errc::UnverifiedIdentity, "sender '" + tx.from + "'");
        }
    }

    tx.submitted_at = now_;
    apply_eager_effects(tx);

    auto [it, inserted] = txs_.emplace(tx.id, std::move(tx));
    mempool_.push_back(it->first);
    ++total_submitted_;

    if (mempool_.size() >= params_.block_size) seal_block(now_);
    return it->first;
}

void Ledger::apply_eager_effects(const Tx& tx) {
    switch (tx.kind) {
        case TxKind::Mint: {
            if (tx.amount < 0) raise(Errc::ConfigInvalid, "mint amount must be non-negative");
            require_account(tx.to).balance += tx.amount;
            total_minted_ += tx.amount;
            break;
        }
        case TxKind::EscrowLock: {
            if (tx.amount < 0) raise(Errc::NegativePayment, "escrow amount");
            if (tx.escrow_id.empty() || escrows_.count(tx.escrow_id)) {
                raise(Errc::InvalidEscrowState, "escrow id '" + tx.escrow_id + "' not fresh");
            }
            Account& payer = require_account(tx.from);
            if (payer.balance < tx.amount) {
                raise(Errc::InsufficientBalance,
                      "locking " + std::to_string(tx.amount) + " from '" + tx.from + "'");
            }
            payer.balance -= tx.amount;
            escrows_[tx.escrow_id] =
                Escrow{tx.escrow_id, tx.from, tx.to, tx.amount, EscrowState::Locked};
            break;
        }
        case TxKind::EscrowRelease: {
            auto it = escrows_.find(tx.escrow_id);
            if (it == escrows_.end() || it->second.state != EscrowState::Locked) {
                raise(Errc::InvalidEscrowState, "release of '" + tx.escrow_id + "'");
            }
            require_account(it->second.payee).balance += it->second.amount;
            it->second.state = EscrowState::Released;
            break;
        }
        case TxKind::EscrowRefund: {
            auto it = escrows_.find(tx.escrow_id);
            if (it == escrows_.end() || it->second.state != EscrowState::Locked) {
                raise(Errc::InvalidEscrowState, "refund of '" + tx.escrow_id + "'");
            }
            require_account(it->second.payer).balance += it->second.amount;
            it->second.state = EscrowState::Refunded;
            break;
        }
        case TxKind::PoolTrade: {
            // Settlement happens at inclusion; accepting the tx only checks
            // that its escrow is in place.
            auto it = escrows_.find(tx.escrow_id);
            if (it == escrows_.end() || it->second.state != EscrowState::Locked) {
                raise(Errc::InvalidEscrowState, "pool trade escrow '" + tx.escrow_id + "'");
            }
            break;
        }
        case TxKind::Transfer:
        case TxKind::ChannelOp:
            break;  // applied (or checked) at inclusion / no money effect
    }
}

void Ledger::seal_block(long long at) {
    const std::size_t take = std::min(params_.block_size, mempool_.size());
    Block block;
    block.height = blocks_.size();
    block.sealed_at = at;
    block.tx_ids.reserve(take);

    for (std::size_t i = 0; i < take; ++i) {
        const std::string& id = mempool_[i];
        const Tx& tx = txs_.at(id);
        switch (tx.kind) {
            case TxKind::Transfer: {
                Account& from = require_account(tx.from);
                if (tx.amount < 0) {
                    rejections_.push_back({id, Errc::NegativePayment, at});
                    continue;
                }
                if (from.balance < tx.amount) {
                    rejections_.push_back({id, Errc::InsufficientBalance, at});
                    continue;
                }
                from.balance -= tx.amount;
                require_account(tx.to).balance += tx.amount;
                break;
            }
            case TxKind::PoolTrade: {
                auto it = escrows_.find(tx.escrow_id);
                if (it == escrows_.end() || it->second.state != EscrowState::Locked) {
                    rejections_.push_back({id, Errc::InvalidEscrowState, at});
                    continue;
                }
                require_account(it->second.payee).balance += it->second.amount;
                it->second.state = EscrowState::Released;
                break;
            }
            default:
                break;  // eager kinds already applied
        }
        block.tx_ids.push_back(id);
    }

    mempool_.erase(mempool_.begin(), mempool_.begin() + static_cast<long>(take));
    blocks_.push_back(std::move(block));
    seal_anchor_ = at;
}

void Ledger::advance_time(long long t) {
    if (t < now_) raise(Errc::ConfigInvalid, "clock must not move backwards");
    while (seal_anchor_ + params_.block_timeout_s <= t) {
        const long long boundary = seal_anchor_ + params_.block_timeout_s;
        now_ = boundary;
        if (!mempool_.empty()) {
            seal_block(boundary);  // also moves the anchor
        } else {
            seal_anchor_ = boundary;
        }
    }
    now_ = t;
}

void Ledger::apply_settlement(const std::string& from, const std::string& to,
                              Amount amount) {
    if (amount < 0) raise(Errc::NegativePayment, "settlement amount");
    Account& payer = require_account(from);
    if (payer.balance < amount) {
        raise(Errc::InsufficientBalance,
              "settling " + std::to_string(amount) + " from '" + from + "'");
    }
    payer.balance -= amount;
    require_account(to).balance += amount;
}

Amount Ledger::sum_balances() const {
    Amount total = 0;
    for (const auto& [id, account] : accounts_) total += account.balance;
    return total;
}

Amount Ledger::sum_locked() const {
    Amount total = 0;
    for (const auto& [id, escrow] : escrows_) {
        if (escrow.state == EscrowState::Locked) total += escrow.amount;
    }
    return total;
}

} // namespace rwasim
