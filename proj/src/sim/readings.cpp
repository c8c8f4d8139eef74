#include "gridtrust/sim/readings.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gridtrust/errors.hpp"

namespace gridtrust::sim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

// Digits with at most one decimal point; sign and range are checked later.
bool is_decimal(const std::string& f) {
  bool digit = false, point = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const char c = f[i];
    if (c == '-' && i == 0) continue;
    if (c == '.') {
      if (point) return false;
      point = true;
    } else if (c >= '0' && c <= '9') {
      digit = true;
    } else {
      return false;
    }
  }
  return digit;
}

std::chrono::sys_days parse_date(const std::string& date) {
  int y = 0;
  unsigned m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  std::istringstream ss(date);
  ss >> y >> dash1 >> m >> dash2 >> d;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ss || dash1 != '-' || dash2 != '-' || !ymd.ok() || date.size() != 10) {
    throw ParseError("invalid date '" + date + "'");
  }
  return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  std::ostringstream out;
  out << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
      << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day());
  return out.str();
}

int fraction_digits(const crypto::FixedPointCodec& codec) {
  int digits = 0;
  for (std::int64_t s = codec.reading_scale(); s > 1; s /= 10) ++digits;
  return digits;
}

std::string format_reading(std::int64_t encoded, std::int64_t scale) {
  int digits = 0;
  for (std::int64_t s = scale; s > 1; s /= 10) ++digits;
  std::ostringstream out;
  out << encoded / scale;
  if (digits > 0) out << '.' << std::setfill('0') << std::setw(digits) << encoded % scale;
  return out.str();
}

}  // namespace

std::vector<ReadingSeries> parse_readings(std::istream& in, std::size_t slots, const crypto::FixedPointCodec& codec) {
  std::vector<ReadingSeries> out;
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError("empty readings file");
  ++row;
  const auto header = split_csv_line(trim(line));
  if (header.size() != slots + 2 || header[0] != "meter_id" || header[1] != "date") {
    throw ParseError(row, "header must be meter_id,date,r1..r" + std::to_string(slots));
  }
  for (std::size_t t = 0; t < slots; ++t) {
    if (trim(header[t + 2]) != "r" + std::to_string(t + 1)) throw ParseError(row, "unexpected column " + header[t + 2]);
  }
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != slots + 2) {
      throw ParseError(row, "expected " + std::to_string(slots) + " readings, got " +
                                std::to_string(fields.size() >= 2 ? fields.size() - 2 : 0));
    }
    ReadingSeries s;
    try {
      std::size_t pos = 0;
      const unsigned long id = std::stoul(fields[0], &pos);
      if (pos != fields[0].size() || id > UINT32_MAX) throw std::invalid_argument("meter id");
      s.meter_id = static_cast<std::uint32_t>(id);
    } catch (const std::exception&) {
      throw ParseError(row, "invalid meter id '" + fields[0] + "'");
    }
    try {
      parse_date(fields[1]);
    } catch (const ParseError& e) {
      throw ParseError(row, e.what());
    }
    s.date = fields[1];
    s.readings.reserve(slots);
    for (std::size_t t = 0; t < slots; ++t) {
      const std::string f = trim(fields[t + 2]);
      if (!is_decimal(f)) throw ParseError(row, "malformed reading '" + f + "' in column r" + std::to_string(t + 1));
      if (f[0] == '-') throw RangeError("row " + std::to_string(row) + ": negative reading " + f);
      const auto point = f.find('.');
      if (point != std::string::npos && f.size() - point - 1 > static_cast<std::size_t>(fraction_digits(codec))) {
        throw ParseError(row, "reading '" + f + "' has more fraction digits than the schema allows");
      }
      std::int64_t v = 0;
      try {
        v = codec.parse_reading(f);
      } catch (const RangeError& e) {
        throw RangeError("row " + std::to_string(row) + ": " + e.what());
      }
      s.readings.push_back(v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ReadingSeries> load_readings(const std::filesystem::path& path, std::size_t slots,
                                         const crypto::FixedPointCodec& codec) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open readings file " + path.string());
  return parse_readings(in, slots, codec);
}

void write_readings(std::ostream& out, const std::vector<ReadingSeries>& series, const crypto::FixedPointCodec& codec) {
  const std::size_t slots = series.empty() ? 48 : series.front().readings.size();
  out << "meter_id,date";
  for (std::size_t t = 0; t < slots; ++t) out << ",r" << t + 1;
  out << '\n';
  for (const auto& s : series) {
    out << s.meter_id << ',' << s.date;
    for (auto r : s.readings) out << ',' << format_reading(r, codec.reading_scale());
    out << '\n';
  }
}

std::string add_days(const std::string& start, int days) {
  return format_date(parse_date(start) + std::chrono::days{days});
}

std::string slot_label(const std::string& date, std::size_t slot, std::size_t slots) {
  const std::size_t minutes = slot * (24 * 60) / slots;
  std::ostringstream out;
  out << date << 'T' << std::setfill('0') << std::setw(2) << minutes / 60 << ':' << std::setw(2) << minutes % 60;
  return out.str();
}

std::vector<ReadingSeries> synthesize_readings(std::size_t meters, std::size_t days, const std::string& start_date,
                                               std::size_t slots, Rng& rng, const SyntheticLoadModel& model,
                                               const crypto::FixedPointCodec& codec) {
  struct Household {
    double base, morning, evening, morning_at, evening_at;
  };
  std::vector<Household> homes;
  for (std::size_t i = 0; i < meters; ++i) {
    homes.push_back({rng.uniform(model.base_min_kwh, model.base_max_kwh), rng.uniform(0.1, model.peak_max_kwh / 2),
                     rng.uniform(0.3, model.peak_max_kwh), rng.uniform(6.5, 9.0), rng.uniform(17.0, 21.0)});
  }
  const double limit = crypto::FixedPointCodec::kMaxReadingKwh;
  std::vector<ReadingSeries> out;
  for (std::size_t day = 0; day < days; ++day) {
    const std::string date = add_days(start_date, static_cast<int>(day));
    for (std::size_t i = 0; i < meters; ++i) {
      const Household& h = homes[i];
      const double level = std::exp(model.day_sigma * std::clamp(rng.normal(), -2.5, 2.5));
      ReadingSeries s{static_cast<std::uint32_t>(i + 1), date, {}};
      for (std::size_t t = 0; t < slots; ++t) {
        const double hour = 24.0 * (static_cast<double>(t) + 0.5) / static_cast<double>(slots);
        const double dm = (hour - h.morning_at) / 1.2;
        const double de = (hour - h.evening_at) / 1.8;
        const double shape = h.base + h.morning * std::exp(-dm * dm) + h.evening * std::exp(-de * de);
        const double noise = std::exp(model.slot_sigma * std::clamp(rng.normal(), -3.0, 3.0));
        const double kwh = std::min(limit, shape * level * noise * 24.0 / static_cast<double>(slots) * 2.0);
        s.readings.push_back(codec.encode_reading(kwh));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace gridtrust::sim
