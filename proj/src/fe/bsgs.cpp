#include "gridtrust/fe/bsgs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "gridtrust/errors.hpp"

namespace gridtrust::fe {

using crypto::PlainPoint;

namespace {

constexpr std::size_t kChunk = 512;

struct BabyEntry {
  std::uint64_t fingerprint;
  std::uint32_t j;
  friend bool operator<(const BabyEntry& a, const BabyEntry& b) {
    return a.fingerprint < b.fingerprint || (a.fingerprint == b.fingerprint && a.j < b.j);
  }
};

std::uint64_t fingerprint(const PlainPoint& affine_point) { return affine_point.jx().to_int().limb[0]; }

// Fingerprints of j * base for j = 1..m, sorted. Matching x covers both +j and -j.
struct BabyTable {
  std::vector<BabyEntry> entries;

  BabyTable(const PlainPoint& base, std::uint32_t m) {
    entries.reserve(m);
    std::vector<PlainPoint> chunk;
    chunk.reserve(kChunk);
    PlainPoint acc;
    const PlainPoint b = base.normalized();
    std::uint32_t j = 0;
    while (j < m) {
      chunk.clear();
      for (std::size_t k = 0; k < kChunk && j < m; ++k) {
        acc = acc.add_mixed(b.jx(), b.jy());
        chunk.push_back(acc);
        ++j;
      }
      PlainPoint::batch_normalize(chunk);
      const std::uint32_t first = j - static_cast<std::uint32_t>(chunk.size()) + 1;
      for (std::size_t k = 0; k < chunk.size(); ++k) {
        entries.push_back({fingerprint(chunk[k]), first + static_cast<std::uint32_t>(k)});
      }
    }
    std::sort(entries.begin(), entries.end());
  }
};

struct Cache {
  std::mutex mu;
  std::map<std::pair<crypto::PointBytes, std::uint32_t>, std::shared_ptr<const BabyTable>> tables;
};

Cache& cache() {
  static Cache c;
  return c;
}

std::shared_ptr<const BabyTable> table_for(const PlainPoint& base, std::uint32_t m) {
  auto& c = cache();
  const auto key = std::make_pair(base.to_bytes(), m);
  {
    std::lock_guard lock(c.mu);
    auto it = c.tables.find(key);
    if (it != c.tables.end()) return it->second;
  }
  // Built outside the lock; a concurrent duplicate build is harmless.
  auto built = std::make_shared<const BabyTable>(base, m);
  std::lock_guard lock(c.mu);
  return c.tables.emplace(key, std::move(built)).first->second;
}

std::uint32_t baby_steps_for(std::uint64_t width) {
  // Tables are reused across many searches, so they are sized a few times
  // above the balanced sqrt to cut per-search giant steps.
  const double balanced = std::ceil(std::sqrt(static_cast<double>(width) + 1.0));
  const double m = std::min(4.0 * balanced, static_cast<double>(kMaxBabySteps));
  const double half = std::ceil((static_cast<double>(width) + 1.0) / 2.0);
  return static_cast<std::uint32_t>(std::max(1.0, std::min(m, half)));
}

}  // namespace

std::int64_t bsgs_dlog(const PlainPoint& target, const PlainPoint& base, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw RangeError("empty dlog range");
  const auto width = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (width > static_cast<std::uint64_t>(kMaxDlogRange)) throw RangeError("dlog range exceeds 2^40");
  if (base.is_identity()) throw MisuseError("dlog base is the identity");

  // Shift to k' = k - lo in [0, width].
  const PlainPoint shifted = target - base.mul_signed(lo);
  if (shifted.is_identity()) return lo;

  const std::uint32_t m = baby_steps_for(width);
  const auto table = table_for(base, m);
  const PlainPoint stride = base.mul(crypto::UInt<1>(2ULL * m + 1)).normalized();
  const PlainPoint neg_stride = -stride;

  // Giant step i tests Q_i = shifted - c_i base with centre c_i = m + i (2m + 1),
  // so each step covers c_i - m .. c_i + m.
  PlainPoint q = shifted - base.mul(crypto::UInt<1>(m));
  std::uint64_t centre = m;
  std::vector<PlainPoint> chunk;
  std::vector<std::uint64_t> centres;
  chunk.reserve(kChunk);
  centres.reserve(kChunk);
  bool done = false;
  while (!done) {
    chunk.clear();
    centres.clear();
    while (chunk.size() < kChunk) {
      if (centre > width + m) {
        done = true;
        break;
      }
      chunk.push_back(q);
      centres.push_back(centre);
      q = q.add_mixed(neg_stride.jx(), neg_stride.jy());
      centre += 2ULL * m + 1;
    }
    PlainPoint::batch_normalize(chunk);
    for (std::size_t k = 0; k < chunk.size(); ++k) {
      std::uint64_t found = 0;
      bool hit = false;
      if (chunk[k].is_identity()) {
        found = centres[k];
        hit = true;
      } else {
        const BabyEntry probe{fingerprint(chunk[k]), 0};
        for (auto it = std::lower_bound(table->entries.begin(), table->entries.end(), probe);
             it != table->entries.end() && it->fingerprint == probe.fingerprint; ++it) {
          const PlainPoint candidate = base.mul(crypto::UInt<1>(it->j));
          if (candidate == chunk[k]) {
            found = centres[k] + it->j;
          } else if (candidate == -chunk[k]) {
            found = centres[k] - it->j;
          } else {
            continue;
          }
          hit = true;
          break;
        }
      }
      if (hit) {
        // Outside [0, width] means the true log lies outside the range.
        if (found > width) throw DlogNotFound("discrete log outside the search range");
        return lo + static_cast<std::int64_t>(found);
      }
    }
  }
  throw DlogNotFound("discrete log outside the search range");
}

void clear_bsgs_cache() {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  c.tables.clear();
}

std::size_t bsgs_cache_size() {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  return c.tables.size();
}

}  // namespace gridtrust::fe
