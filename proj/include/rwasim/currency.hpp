#pragma once

#include <cmath>
#include <cstdint>

namespace rwasim {

// All ledger balances are integer micro-units of currency so that transfers,
// escrows and payouts conserve value exactly (no floating-point drift in the
// conservation invariant).  Market math runs in doubles and is converted at
// the settlement boundary.
using Amount = std::int64_t;

inline constexpr Amount kMicrosPerUnit = 1'000'000;

// Settlement conversion: a buyer is charged the smallest integer amount that
// covers the quoted cost, so pools never undercollect by a rounding hair.
inline Amount to_micros_ceil(double units) {
    return static_cast<Amount>(std::ceil(units * static_cast<double>(kMicrosPerUnit) -
                                         1e-9));
}

inline Amount to_micros_round(double units) {
    return static_cast<Amount>(std::llround(units * static_cast<double>(kMicrosPerUnit)));
}

inline double to_units(Amount micros) {
    return static_cast<double>(micros) / static_cast<double>(kMicrosPerUnit);
}

} // namespace rwasim
