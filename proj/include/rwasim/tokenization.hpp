#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwasim/errors.hpp"

namespace rwasim {

// On-chain representation of spectrum holdings.
//
// A SpectrumAsset is a licensed band (e.g. 10 MHz around 3.5 GHz) owned by one
// account.  Fractionalizing it mints `count` slice tokens of equal bandwidth;
// the asset itself then only exists through its slices.  Slices can change
// holder, be marked as pooled (listed for sale while still held by the
// issuer), be locked (e.g. as collateral of a payment channel, which forbids
// transfer), and carry time-boxed usage rights measured in whole hours.

struct SpectrumAsset {
    std::string id;
    std::string owner;         // original issuer
    double bandwidth_mhz = 0;
    double center_ghz = 0;
    bool fractionalized = false;
    std::vector<std::string> slice_ids;
};

struct SliceToken {
    std::string id;
    std::string asset_id;
    std::uint32_t index = 0;
    double bandwidth_mhz = 0;
    std::string holder;
    bool pooled = false;  // listed in a market pool but not yet sold
    bool locked = false;  // channel collateral; transfers forbidden
};

struct UsageRight {
    std::string id;
    std::string token_id;
    std::string lessee;
    long long start_hour = 0;
    long long duration_hours = 0;  // whole hours, at least one
};

class TokenRegistry {
  public:
    // --- assets ------------------------------------------------------------
    const SpectrumAsset& register_asset(const std::string& id, const std::string& owner,
                                        double bandwidth_mhz, double center_ghz);

    // Mints `count` equal slices of the asset.  Only the owner may call, and
    // only once per asset.  Returns the new slice token ids.
    const std::vector<std::string>& fractionalize(const std::string& asset_id,
                                                  const std::string& caller,
                                                  std::uint32_t count);

    const SpectrumAsset& asset(const std::string& id) const;
    bool asset_exists(const std::string& id) const { return assets_.count(id) != 0; }

    // An asset counts as fully sold once every slice is held by someone other
    // than the issuing owner.
    bool fully_sold(const std::string& asset_id) const;
    std::size_t slices_sold(const std::string& asset_id) const;

    // --- slices ------------------------------------------------------------
    const SliceToken& token(const std::string& id) const;
    bool token_exists(const std::string& id) const { return tokens_.count(id) != 0; }

    void transfer(const std::string& token_id, const std::string& from,
                  const std::string& to);
    void set_pooled(const std::string& token_id, bool pooled);
    void lock(const std::string& token_id);    // refuses double-locking
    void unlock(const std::string& token_id);

    // --- usage rights ------------------------------------------------------
    // Grants the lessee use of the slice for [start_hour, start_hour+duration).
    // Durations are whole hours; fractional or sub-hour requests are refused.
    // Rights on the same slice must not overlap in time.
    const UsageRight& grant_usage_right(const std::string& token_id,
                                        const std::string& grantor,
                                        const std::string& lessee, long long start_hour,
                                        double duration_hours);

    const std::vector<UsageRight>& rights_for(const std::string& token_id) const;

  private:
    SliceToken& require_token(const std::string& id);
    SpectrumAsset& require_asset(const std::string& id);

    std::unordered_map<std::string, SpectrumAsset> assets_;
    std::unordered_map<std::string, SliceToken> tokens_;
    std::unordered_map<std::string, std::vector<UsageRight>> rights_;
    std::vector<UsageRight> no_rights_;  // returned for tokens with none
    std::uint64_t next_right_ = 0;
};

} // namespace rwasim
