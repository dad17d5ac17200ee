#pragma once

#include <stdexcept>
#include <string>

namespace rwasim {

// Machine-checkable failure codes. Every throwing operation in the library
// raises SimError with one of these so callers (and tests) can branch on the
// exact cause instead of parsing message text.
enum class Errc {
    // ledger
    DuplicateTxId,
    UnverifiedIdentity,
    InsufficientBalance,
    InvalidEscrowState,
    UnknownAccount,
    // tokenization
    NotHolder,
    AlreadyFractionalized,
    InvalidCount,
    SubHourDuration,
    OverlappingRight,
    TokenLocked,
    UnknownAsset,
    UnknownToken,
    // amm
    NotAllSlicesHeld,
    NonPositiveVirtualReserve,
    InsufficientInventory,
    InsufficientBudget,
    InsufficientReserve,
    EmptyPool,
    // channels
    TokensAlreadyLocked,
    MissingAttestation,
    NegativePayment,
    StaleStateAfterFresherSubmission,
    UnknownChannel,
    ChannelNotOpen,
    DisputeWindowOpen,
    // adversary
    RatioOutOfRange,
    // config / cli
    UnknownParameter,
    ConfigInvalid,
};

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DuplicateTxId: return "DuplicateTxId";
        case Errc::UnverifiedIdentity: return "UnverifiedIdentity";
        case Errc::InsufficientBalance: return "InsufficientBalance";
        case Errc::InvalidEscrowState: return "InvalidEscrowState";
        case Errc::UnknownAccount: return "UnknownAccount";
        case Errc::NotHolder: return "NotHolder";
        case Errc::AlreadyFractionalized: return "AlreadyFractionalized";
        case Errc::InvalidCount: return "InvalidCount";
        case Errc::SubHourDuration: return "SubHourDuration";
        case Errc::OverlappingRight: return "OverlappingRight";
        case Errc::TokenLocked: return "TokenLocked";
        case Errc::UnknownAsset: return "UnknownAsset";
        case Errc::UnknownToken: return "UnknownToken";
        case Errc::NotAllSlicesHeld: return "NotAllSlicesHeld";
        case Errc::NonPositiveVirtualReserve: return "NonPositiveVirtualReserve";
        case Errc::InsufficientInventory: return "InsufficientInventory";
        case Errc::InsufficientBudget: return "InsufficientBudget";
        case Errc::InsufficientReserve: return "InsufficientReserve";
        case Errc::EmptyPool: return "EmptyPool";
        case Errc::TokensAlreadyLocked: return "TokensAlreadyLocked";
        case Errc::MissingAttestation: return "MissingAttestation";
        case Errc::NegativePayment: return "NegativePayment";
        case Errc::StaleStateAfterFresherSubmission: return "StaleStateAfterFresherSubmission";
        case Errc::UnknownChannel: return "UnknownChannel";
        case Errc::ChannelNotOpen: return "ChannelNotOpen";
        case Errc::DisputeWindowOpen: return "DisputeWindowOpen";
        case Errc::RatioOutOfRange: return "RatioOutOfRange";
        case Errc::UnknownParameter: return "UnknownParameter";
        case Errc::ConfigInvalid: return "ConfigInvalid";
    }
    return "UnknownError";
}

class SimError : public std::runtime_error {
  public:
    SimError(Errc code, const std::string& what_arg)
        : std::runtime_error(what_arg), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw SimError(code, std::string(errc_name(code)) + ": " + message);
}

} // namespace rwasim
