#include "rwasim/tokenization.hpp"

#include <cmath>

namespace rwasim {

const SpectrumAsset& TokenRegistry::register_asset(const std::string& id,
                                                   const std::string& owner,
                                                   double bandwidth_mhz,
                                                   double center_ghz) {
    if (assets_.count(id)) raise(Errc::ConfigInvalid, "asset '" + id + "' already exists");
    if (bandwidth_mhz <= 0) raise(Errc::ConfigInvalid, "bandwidth must be positive");
    SpectrumAsset asset;
    asset.id = id;
    asset.owner = owner;
    asset.bandwidth_mhz = bandwidth_mhz;
    asset.center_ghz = center_ghz;
    return assets_.emplace(id, std::move(asset)).first->second;
}

SpectrumAsset& TokenRegistry::require_asset(const std::string& id) {
    auto it = assets_.find(id);
    if (it == assets_.end()) raise(Errc::UnknownAsset, "no asset '" + id + "'");
    return it->second;
}

SliceToken& TokenRegistry::require_token(const std::string& id) {
    auto it = tokens_.find(id);
    if (it == tokens_.end()) raise(Errc::UnknownToken, "no slice '" + id + "'");
    return it->second;
}

const SpectrumAsset& TokenRegistry::asset(const std::string& id) const {
    return const_cast<TokenRegistry*>(this)->require_asset(id);
}

const SliceToken& TokenRegistry::token(const std::string& id) const {
    return const_cast<TokenRegistry*>(this)->require_token(id);
}

const std::vector<std::string>& TokenRegistry::fractionalize(const std::string& asset_id,
                                                             const std::string& caller,
                                                             std::uint32_t count) {
    SpectrumAsset& asset = require_asset(asset_id);
    if (caller != asset.owner) {
        raise(Errc::NotHolder, "'" + caller + "' does not own asset '" + asset_id + "'");
    }
    if (asset.fractionalized) {
        raise(Errc::AlreadyFractionalized, "asset '" + asset_id + "'");
    }
    if (count == 0) raise(Errc::InvalidCount, "slice count must be positive");

    asset.fractionalized = true;
    asset.slice_ids.reserve(count);
    const double slice_bw = asset.bandwidth_mhz / static_cast<double>(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        SliceToken slice;
        slice.id = asset_id + "/s" + std::to_string(i);
        slice.asset_id = asset_id;
        slice.index = i;
        slice.bandwidth_mhz = slice_bw;
        slice.holder = asset.owner;
        asset.slice_ids.push_back(slice.id);
        tokens_.emplace(slice.id, std::move(slice));
    }
    return asset.slice_ids;
}

bool TokenRegistry::fully_sold(const std::string& asset_id) const {
    const SpectrumAsset& asset = this->asset(asset_id);
    if (!asset.fractionalized) return false;
    for (const std::string& slice_id : asset.slice_ids) {
        if (token(slice_id).holder == asset.owner) return false;
    }
    return true;
}

std::size_t TokenRegistry::slices_sold(const std::string& asset_id) const {
    const SpectrumAsset& asset = this->asset(asset_id);
    std::size_t sold = 0;
    for (const std::string& slice_id : asset.slice_ids) {
        if (token(slice_id).holder != asset.owner) ++sold;
    }
    return sold;
}

void TokenRegistry::transfer(const std::string& token_id, const std::string& from,
                             const std::string& to) {
    SliceToken& slice = require_token(token_id);
    if (slice.holder != from) {
        raise(Errc::NotHolder, "'" + from + "' does not hold slice '" + token_id + "'");
    }
    if (slice.locked) raise(Errc::TokenLocked, "slice '" + token_id + "'");
    slice.holder = to;
    slice.pooled = false;
}

void TokenRegistry::set_pooled(const std::string& token_id, bool pooled) {
    require_token(token_id).pooled = pooled;
}

void TokenRegistry::lock(const std::string& token_id) {
    SliceToken& slice = require_token(token_id);
    if (slice.locked) raise(Errc::TokensAlreadyLocked, "slice '" + token_id + "'");
    slice.locked = true;
}

void TokenRegistry::unlock(const std::string& token_id) {
    require_token(token_id).locked = false;
}

const UsageRight& TokenRegistry::grant_usage_right(const std::string& token_id,
                                                   const std::string& grantor,
                                                   const std::string& lessee,
                                                   long long start_hour,
                                                   double duration_hours) {
    SliceToken& slice = require_token(token_id);
    if (slice.holder != grantor) {
        raise(Errc::NotHolder, "'" + grantor + "' does not hold slice '" + token_id + "'");
    }
    if (duration_hours < 1.0 || duration_hours != std::floor(duration_hours)) {
        raise(Errc::SubHourDuration,
              "rights cover whole hours; got " + std::to_string(duration_hours));
    }
    const long long duration = static_cast<long long>(duration_hours);
    const long long end_hour = start_hour + duration;
    for (const UsageRight& existing : rights_[token_id]) {
        const long long existing_end = existing.start_hour + existing.duration_hours;
        if (start_hour < existing_end && existing.start_hour < end_hour) {
            raise(Errc::OverlappingRight,
                  "slice '" + token_id + "' hours [" + std::to_string(start_hour) + ", " +
                      std::to_string(end_hour) + ") collide with '" + existing.id + "'");
        }
    }

    UsageRight right;
    right.id = "r" + std::to_string(next_right_++);
    right.token_id = token_id;
    right.lessee = lessee;
    right.start_hour = start_hour;
    right.duration_hours = duration;
    rights_[token_id].push_back(right);
    return rights_[token_id].back();
}

const std::vector<UsageRight>& TokenRegistry::rights_for(const std::string& token_id) const {
    auto it = rights_.find(token_id);
    return it == rights_.end() ? no_rights_ : it->second;
}

} // namespace rwasim
