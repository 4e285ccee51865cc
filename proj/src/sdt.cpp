#include "dx/sdt.hpp"

#include <algorithm>
#include <cmath>

#include "dx/error.hpp"
#include "dx/text.hpp"

namespace dx {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("normal quantile needs p in (0, 1)");

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -x : x;
}

SdtCorrection parse_correction(std::string_view name) {
  if (name == "loglinear") return SdtCorrection::kLogLinear;
  if (name == "none") return SdtCorrection::kNone;
  throw UsageError("unknown correction '" + std::string(name) + "' (expected loglinear or none)");
}

std::string_view to_string(SdtCorrection c) {
  return c == SdtCorrection::kLogLinear ? "loglinear" : "none";
}

SDTEstimate sdt_from_rates(double hit_rate, double false_alarm_rate) {
  SDTEstimate e;
  e.hit_rate = hit_rate;
  e.false_alarm_rate = false_alarm_rate;
  const double zh = normal_quantile(hit_rate);
  const double zf = normal_quantile(false_alarm_rate);
  e.d_prime = zh - zf;
  e.c = -(zh + zf) / 2.0;
  return e;
}

SDTEstimate sdt_estimate(std::uint64_t hits, std::uint64_t misses, std::uint64_t false_alarms,
                         std::uint64_t correct_rejections, SdtCorrection correction) {
  const auto signal = hits + misses;
  const auto noise = false_alarms + correct_rejections;
  if (signal == 0) throw UsageError("no signal trials (hits + misses = 0)");
  if (noise == 0) throw UsageError("no noise trials (false_alarms + correct_rejections = 0)");

  double h, f;
  if (correction == SdtCorrection::kLogLinear) {
    h = (static_cast<double>(hits) + 0.5) / (static_cast<double>(signal) + 1.0);
    f = (static_cast<double>(false_alarms) + 0.5) / (static_cast<double>(noise) + 1.0);
  } else {
    if (hits == 0 || misses == 0 || false_alarms == 0 || correct_rejections == 0) {
      throw EstimatorError(
          "hit or false-alarm rate is exactly 0 or 1; z is infinite. Use the loglinear correction");
    }
    h = static_cast<double>(hits) / static_cast<double>(signal);
    f = static_cast<double>(false_alarms) / static_cast<double>(noise);
  }
  auto e = sdt_from_rates(h, f);
  e.hits = hits;
  e.misses = misses;
  e.false_alarms = false_alarms;
  e.correct_rejections = correct_rejections;
  e.corrected = correction == SdtCorrection::kLogLinear;
  return e;
}

std::vector<SdtCounts> load_sdt_counts(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, 1, "missing header");
  std::vector<std::string> header;
  for (auto f : split(line, ',')) header.push_back(normalize_key(f));
  const std::vector<std::string> plain{"hits", "misses", "false_alarms", "correct_rejections"};
  std::vector<std::string> labelled{"label"};
  labelled.insert(labelled.end(), plain.begin(), plain.end());
  const bool has_label = header == labelled;
  if (!has_label && header != plain) {
    throw ParseError(path, 1,
                     "header must be 'hits,misses,false_alarms,correct_rejections' (optionally after 'label')");
  }
  std::vector<SdtCounts> out;
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw ParseError(path, reader.line_number(), "expected " + std::to_string(header.size()) + " columns");
    }
    const std::size_t o = has_label ? 1 : 0;
    std::uint64_t v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const std::string text(trim(f[o + k]));
      if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ParseError(path, reader.line_number(), "count must be a non-negative integer, got '" + text + "'");
      }
      v[k] = std::stoull(text);
    }
    SdtCounts row{has_label ? std::string(trim(f[0])) : std::to_string(out.size() + 1), v[0], v[1], v[2], v[3]};
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace dx
