#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dx {

// Standard normal CDF and its inverse (Wichura's AS 241 rational
// approximation, about 1e-16 relative accuracy). normal_quantile throws
// UsageError outside (0, 1).
double normal_cdf(double x);
double normal_quantile(double p);

enum class SdtCorrection { kLogLinear, kNone };

SdtCorrection parse_correction(std::string_view name);
std::string_view to_string(SdtCorrection c);

struct SDTEstimate {
  double d_prime = 0;
  double c = 0;
  double hit_rate = 0;
  double false_alarm_rate = 0;
  std::uint64_t hits = 0, misses = 0, false_alarms = 0, correct_rejections = 0;
  bool corrected = false;
};

// d' = z(H) - z(F), c = -(z(H) + z(F)) / 2. The log-linear correction uses
// H = (hits + 0.5) / (hits + misses + 1) and likewise for F. Without a
// correction a rate of exactly 0 or 1 is an EstimatorError.
SDTEstimate sdt_estimate(std::uint64_t hits, std::uint64_t misses, std::uint64_t false_alarms,
                         std::uint64_t correct_rejections,
                         SdtCorrection correction = SdtCorrection::kLogLinear);

// Same formulas from rates in (0, 1).
SDTEstimate sdt_from_rates(double hit_rate, double false_alarm_rate);

struct SdtCounts {
  std::string label;
  std::uint64_t hits = 0, misses = 0, false_alarms = 0, correct_rejections = 0;
};

// CSV header `hits,misses,false_alarms,correct_rejections`, optionally
// preceded by a `label` column.
std::vector<SdtCounts> load_sdt_counts(const std::string& path);

}  // namespace dx
