#pragma once

#include <cstdint>

#include "gridtrust/crypto/group.hpp"

namespace gridtrust::fe {

/// Largest hi - lo accepted by bsgs_dlog.
inline constexpr std::int64_t kMaxDlogRange = std::int64_t{1} << 40;
/// Baby-step table size cap.
inline constexpr std::uint32_t kMaxBabySteps = 1U << 20;

/// k with k * base == target and lo <= k <= hi. Throws DlogNotFound when no
/// such k exists, RangeError when hi - lo exceeds kMaxDlogRange or hi < lo.
///
/// Baby-step tables are cached per (base, table size) for the life of the
/// process; the cache is shared by all threads.
std::int64_t bsgs_dlog(const crypto::PlainPoint& target, const crypto::PlainPoint& base, std::int64_t lo,
                       std::int64_t hi);

/// Drops every cached baby-step table.
void clear_bsgs_cache();

/// Number of cached tables (for tests).
std::size_t bsgs_cache_size();

}  // namespace gridtrust::fe
