#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gridtrust/crypto/codec.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::sim {

/// One meter-day of encoded readings r_i[t] (watt-hours at the default scale).
struct ReadingSeries {
  std::uint32_t meter_id = 0;
  std::string date;  // YYYY-MM-DD
  std::vector<std::int64_t> readings;

  friend bool operator==(const ReadingSeries&, const ReadingSeries&) = default;
};

/// CSV with header `meter_id,date,r1,...,rd`, readings as decimal kWh with at
/// most three fraction digits. ParseError (with 1-based line) for a wrong
/// column count or malformed field, RangeError for a negative or oversized
/// reading.
std::vector<ReadingSeries> parse_readings(std::istream& in, std::size_t slots = 48,
                                          const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());
std::vector<ReadingSeries> load_readings(const std::filesystem::path& path, std::size_t slots = 48,
                                         const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

void write_readings(std::ostream& out, const std::vector<ReadingSeries>& series,
                    const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

/// Calendar date `days` after `start` (both YYYY-MM-DD).
std::string add_days(const std::string& start, int days);

/// Slot label "YYYY-MM-DDTHH:MM" for 0-based slot index of a day split into
/// `slots` equal parts.
std::string slot_label(const std::string& date, std::size_t slot, std::size_t slots = 48);

/// Household load profile: base load, morning and evening peaks, a per-day
/// level factor and multiplicative per-slot noise. Values are rounded to the
/// codec's resolution.
struct SyntheticLoadModel {
  double base_min_kwh = 0.05;
  double base_max_kwh = 0.25;
  double peak_max_kwh = 1.2;
  double day_sigma = 0.08;
  double slot_sigma = 0.25;
};

/// meters x days series, meter ids 1..meters, ordered by day then meter.
std::vector<ReadingSeries> synthesize_readings(std::size_t meters, std::size_t days, const std::string& start_date,
                                               std::size_t slots, Rng& rng,
                                               const SyntheticLoadModel& model = SyntheticLoadModel(),
                                               const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

}  // namespace gridtrust::sim
