#include "roadflow/preprocess.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kSpeedFeature = 2;

struct FeatureStats {
  double mean = 0.0;
  double stddev = 0.0;
  long count = 0;
};

FeatureStats feature_stats(const std::vector<ParameterSample>& series,
                           int feature) {
  FeatureStats st;
  double sum = 0.0;
  for (const ParameterSample& s : series) {
    const double v = get_feature(s, feature);
    if (std::isnan(v)) {
      continue;
    }
    sum += v;
    st.count += 1;
  }
  if (st.count == 0) {
    return st;
  }
  st.mean = sum / static_cast<double>(st.count);
  double sq = 0.0;
  for (const ParameterSample& s : series) {
    const double v = get_feature(s, feature);
    if (std::isnan(v)) {
      continue;
    }
    sq += (v - st.mean) * (v - st.mean);
  }
  st.stddev = std::sqrt(sq / static_cast<double>(st.count));
  return st;
}

}  // namespace

CleanResult clean(const std::vector<ParameterSample>& series,
                  const CleanBounds& bounds) {
  CleanResult result;
  result.series = series;

  // Stage one: hard speed bounds.
  for (std::size_t i = 0; i < result.series.size(); ++i) {
    const double v = result.series[i].speed;
    if (std::isnan(v)) {
      continue;
    }
    if (v < bounds.speed_min || v > bounds.speed_max) {
      std::ostringstream reason;
      reason << "speed " << v << " outside [" << bounds.speed_min << ", "
             << bounds.speed_max << "]";
      result.report.push_back({i, kSpeedFeature, reason.str()});
      result.series[i].speed = kNan;
    }
  }

  // Stage two: k-sigma per feature on the stage-one survivors.
  for (int feature = 0; feature < kParameterFeatureCount; ++feature) {
    const FeatureStats st = feature_stats(result.series, feature);
    if (st.count < 2 || st.stddev == 0.0) {
      continue;
    }
    const double lo = st.mean - bounds.sigma_k * st.stddev;
    const double hi = st.mean + bounds.sigma_k * st.stddev;
    for (std::size_t i = 0; i < result.series.size(); ++i) {
      const double v = get_feature(result.series[i], feature);
      if (std::isnan(v) || (v >= lo && v <= hi)) {
        continue;
      }
      std::ostringstream reason;
      reason << parameter_feature_name(feature) << " " << v << " outside "
             << bounds.sigma_k << "-sigma band [" << lo << ", " << hi << "]";
      result.report.push_back({i, feature, reason.str()});
      set_feature(result.series[i], feature, kNan);
    }
  }
  return result;
}

std::vector<ParameterSample> interpolate(
    const std::vector<ParameterSample>& series) {
  std::vector<ParameterSample> out = series;
  const std::size_t n = out.size();
  if (n == 0) {
    return out;
  }

  for (int feature = 0; feature < kParameterFeatureCount; ++feature) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isnan(get_feature(out[i], feature))) {
        present.push_back(i);
      }
    }
    if (present.empty()) {
      throw DataError(std::string("interpolate: feature '") +
                      parameter_feature_name(feature) +
                      "' has no present values");
    }

    // Leading and trailing gaps take the nearest present value.
    for (std::size_t i = 0; i < present.front(); ++i) {
      set_feature(out[i], feature, get_feature(out[present.front()], feature));
    }
    for (std::size_t i = present.back() + 1; i < n; ++i) {
      set_feature(out[i], feature, get_feature(out[present.back()], feature));
    }

    for (std::size_t k = 0; k + 1 < present.size(); ++k) {
      const std::size_t left = present[k];
      const std::size_t right = present[k + 1];
      if (right == left + 1) {
        continue;
      }
      const double lv = get_feature(out[left], feature);
      const double rv = get_feature(out[right], feature);
      for (std::size_t i = left + 1; i < right; ++i) {
        const double t = static_cast<double>(i - left) /
                         static_cast<double>(right - left);
        set_feature(out[i], feature, lv + t * (rv - lv));
      }
    }
  }
  return out;
}

Normalizer Normalizer::fit(const std::vector<ParameterSample>& training) {
  if (training.empty()) {
    throw ConfigError("Normalizer::fit: empty training series");
  }
  Normalizer norm;
  for (int feature = 0; feature < kParameterFeatureCount; ++feature) {
    const FeatureStats st = feature_stats(training, feature);
    if (st.count == 0 || st.stddev <= 0.0) {
      throw ConfigError(std::string("Normalizer::fit: feature '") +
                        parameter_feature_name(feature) +
                        "' is degenerate (zero variance)");
    }
    norm.mu_(feature) = st.mean;
    norm.sigma_(feature) = st.stddev;
  }
  return norm;
}

std::vector<ParameterSample> Normalizer::apply(
    const std::vector<ParameterSample>& series) const {
  std::vector<ParameterSample> out = series;
  for (ParameterSample& s : out) {
    for (int f = 0; f < kParameterFeatureCount; ++f) {
      set_feature(s, f, (get_feature(s, f) - mu_(f)) / sigma_(f));
    }
  }
  return out;
}

std::vector<ParameterSample> Normalizer::invert(
    const std::vector<ParameterSample>& series) const {
  std::vector<ParameterSample> out = series;
  for (ParameterSample& s : out) {
    for (int f = 0; f < kParameterFeatureCount; ++f) {
      set_feature(s, f, get_feature(s, f) * sigma_(f) + mu_(f));
    }
  }
  return out;
}

std::string Normalizer::to_json() const {
  nlohmann::json doc;
  for (int f = 0; f < kParameterFeatureCount; ++f) {
    doc["features"].push_back(parameter_feature_name(f));
    doc["mean"].push_back(mu_(f));
    doc["stddev"].push_back(sigma_(f));
  }
  return doc.dump(2);
}

Normalizer Normalizer::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("Normalizer: invalid JSON: ") + e.what());
  }
  Normalizer norm;
  if (!doc.contains("mean") || !doc.contains("stddev") ||
      doc["mean"].size() != kParameterFeatureCount ||
      doc["stddev"].size() != kParameterFeatureCount) {
    throw DataError("Normalizer: document missing mean/stddev triples");
  }
  for (int f = 0; f < kParameterFeatureCount; ++f) {
    norm.mu_(f) = doc["mean"][f].get<double>();
    norm.sigma_(f) = doc["stddev"][f].get<double>();
    if (norm.sigma_(f) <= 0.0) {
      throw DataError("Normalizer: non-positive stddev in document");
    }
  }
  return norm;
}

std::vector<WindowedSample> make_windows(
    const std::vector<ParameterSample>& normalized,
    const std::vector<std::uint8_t>& congestion_flags, int seq_len,
    long horizon_samples) {
  if (seq_len < 1) {
    throw ConfigError("make_windows: seq_len must be >= 1");
  }
  if (congestion_flags.size() != normalized.size()) {
    throw DataError("make_windows: flags and series must align");
  }
  const long n = static_cast<long>(normalized.size());

  // Episode onsets: indices where the flag rises.
  std::vector<long> onsets;
  for (long i = 0; i < n; ++i) {
    if (congestion_flags[i] && (i == 0 || !congestion_flags[i - 1])) {
      onsets.push_back(i);
    }
  }

  std::vector<WindowedSample> samples;
  if (n < seq_len) {
    return samples;
  }
  samples.reserve(static_cast<std::size_t>(n - seq_len + 1));
  std::size_t next_onset = 0;
  for (long start = 0; start + seq_len <= n; ++start) {
    const long last = start + seq_len - 1;
    while (next_onset < onsets.size() && onsets[next_onset] <= last) {
      ++next_onset;
    }
    WindowedSample sample;
    sample.sequence.resize(seq_len, kParameterFeatureCount);
    for (int t = 0; t < seq_len; ++t) {
      const ParameterSample& s = normalized[static_cast<std::size_t>(start + t)];
      sample.sequence(t, 0) = s.flow;
      sample.sequence(t, 1) = s.density;
      sample.sequence(t, 2) = s.speed;
    }
    sample.label = (next_onset < onsets.size() &&
                    onsets[next_onset] <= last + horizon_samples)
                       ? 1
                       : 0;
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace roadflow
