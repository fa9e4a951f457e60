#include "ribbon/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numfmt.hpp"
#include "ribbon/error.hpp"

namespace ribbon::signal {

void validate(const TrialRecording& trial) {
  bool seen[2] = {false, false};
  double prev = 0.0;
  for (std::size_t i = 0; i < trial.frames.size(); ++i) {
    const auto& f = trial.frames[i];
    if (!std::isfinite(f.t) || f.t < 0.0) {
      fail(ErrorKind::InvalidInput, "frame " + std::to_string(i) + ": time must be finite and >= 0");
    }
    if (f.channel != 1 && f.channel != 2) {
      fail(ErrorKind::InvalidInput, "frame " + std::to_string(i) + ": channel must be 1 or 2");
    }
    if (f.active < 0 || f.ambient < 0) {
      fail(ErrorKind::InvalidInput, "frame " + std::to_string(i) + ": negative ADC reading");
    }
    if (i > 0 && f.t < prev) {
      fail(ErrorKind::InvalidInput, "frame " + std::to_string(i) + ": time goes backwards");
    }
    prev = f.t;
    seen[f.channel - 1] = true;
  }
  if (!seen[0] || !seen[1]) {
    fail(ErrorKind::InvalidInput, "trial '" + trial.meta.trial_id + "' lacks a channel");
  }
}

CorrectedValue ambient_correct(const RawFrame& frame) {
  const auto diff = frame.active - frame.ambient;
  if (diff < 0) return {0.0, true};
  return {static_cast<double>(diff), false};
}

double interpolate(const Series& s, double t) {
  if (s.empty()) fail(ErrorKind::InvalidInput, "interpolating an empty series");
  if (t <= s.t.front()) return s.v.front();
  if (t >= s.t.back()) return s.v.back();
  const auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - s.t.begin());
  const std::size_t lo = hi - 1;
  const double span = s.t[hi] - s.t[lo];
  if (span <= 0.0) return s.v[hi];
  const double u = (t - s.t[lo]) / span;
  return s.v[lo] + u * (s.v[hi] - s.v[lo]);
}

TwoChannel correct_trial(const TrialRecording& trial) {
  validate(trial);
  TwoChannel out;
  for (const auto& f : trial.frames) {
    const auto c = ambient_correct(f);
    auto& s = out.ch[static_cast<std::size_t>(f.channel - 1)];
    s.t.push_back(f.t);
    s.v.push_back(c.value);
    if (c.clamped) ++out.clamped;
  }
  return out;
}

double baseline_mean(const Series& series, double window_s) {
  if (series.empty()) fail(ErrorKind::SeriesTooShort, "empty series");
  const double stop = series.t.front() + window_s;
  if (series.t.back() < stop) {
    fail(ErrorKind::SeriesTooShort, "series shorter than the " + detail::format_double(window_s) +
                                        " s baseline window");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < series.size() && series.t[i] < stop; ++i) {
    sum += series.v[i];
    ++n;
  }
  return sum / static_cast<double>(n);
}

Series remove_offset(const Series& series, double window_s) {
  const double b = baseline_mean(series, window_s);
  Series out = series;
  for (double& v : out.v) v -= b;
  return out;
}

Series TrialAverage::channel_mean(int ch) const {
  return {t, mean[static_cast<std::size_t>(ch)]};
}

namespace {

double median_interval(std::span<const std::array<Series, 2>> trials) {
  std::vector<double> diffs;
  for (const auto& tr : trials) {
    for (const auto& s : tr) {
      for (std::size_t i = 1; i < s.size(); ++i) diffs.push_back(s.t[i] - s.t[i - 1]);
    }
  }
  if (diffs.empty()) fail(ErrorKind::SeriesTooShort, "no inter-sample intervals");
  auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  double m = *mid;
  if (diffs.size() % 2 == 0) {
    const double lower = *std::max_element(diffs.begin(), mid);
    m = 0.5 * (m + lower);
  }
  if (!(m > 0.0)) fail(ErrorKind::InvalidInput, "median sampling interval is not positive");
  return m;
}

TrialAverage average_series(std::span<const std::array<Series, 2>> trials) {
  const double dt = median_interval(trials);
  double start = -std::numeric_limits<double>::infinity();
  double stop = std::numeric_limits<double>::infinity();
  for (const auto& tr : trials) {
    for (const auto& s : tr) {
      if (s.empty()) fail(ErrorKind::SeriesTooShort, "trial channel without samples");
      start = std::max(start, s.t.front());
      stop = std::min(stop, s.t.back());
    }
  }
  if (!(stop > start)) fail(ErrorKind::SeriesTooShort, "trials share no common time span");

  TrialAverage out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / dt + 1e-9)) + 1;
  out.t.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.t[i] = start + static_cast<double>(i) * dt;

  const double n = static_cast<double>(trials.size());
  for (std::size_t c = 0; c < 2; ++c) {
    out.mean[c].assign(count, 0.0);
    out.stddev[c].assign(count, 0.0);
    std::vector<double> vals(trials.size());
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < trials.size(); ++k) vals[k] = interpolate(trials[k][c], out.t[i]);
      const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      out.mean[c][i] = mean;
      out.stddev[c][i] = trials.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  return out;
}

void check_condition(std::span<const TrialMeta* const> metas) {
  for (const TrialMeta* m : metas) {
    if (std::abs(m->load_g - metas.front()->load_g) > 1e-9 ||
        std::abs(m->voltage_kV - metas.front()->voltage_kV) > 1e-9) {
      fail(ErrorKind::ConditionMismatch,
           "trial '" + m->trial_id + "' was recorded under a different load/voltage than '" +
               metas.front()->trial_id + "'");
    }
  }
}

}  // namespace

TrialAverage average_trials(std::span<const ProcessedTrial> trials) {
  if (trials.size() < 2) fail(ErrorKind::InsufficientTrials, "averaging needs at least 2 trials");
  std::vector<const TrialMeta*> metas;
  std::vector<std::array<Series, 2>> series;
  for (const auto& tr : trials) {
    metas.push_back(&tr.meta);
    series.push_back(tr.signals.ch);
  }
  check_condition(metas);
  return average_series(series);
}

TrialAverage average_trials(std::span<const TrialRecording> recordings) {
  std::vector<ProcessedTrial> processed;
  for (const auto& r : recordings) processed.push_back({r.meta, correct_trial(r)});
  return average_trials(processed);
}

std::vector<double> state_times(const StateTiming& timing) {
  const int n = timing.n_states;
  if (n < 2) fail(ErrorKind::InvalidInput, "need at least two states");
  const double start = timing.start_time;
  const double end = timing.end_time;
  if (!(end > start) || start < 0.0) {
    fail(ErrorKind::InvalidInput, "state timing needs 0 <= start_time < end_time");
  }
  const double pre_end =
      timing.pre_contraction_end.value_or(start + (end - start) * (n - 2.0) / (n - 1.0));
  if (pre_end < start || pre_end >= end) {
    fail(ErrorKind::InvalidInput, "pre_contraction_end must lie in [start_time, end_time)");
  }

  std::vector<double> times;
  for (int k = 0; k + 1 < n; ++k) {
    times.push_back(n > 2 ? start + (pre_end - start) * k / (n - 2.0) : start);
  }
  times.push_back(end);

  if (timing.exclusion) {
    const Interval ex = *timing.exclusion;
    if (!(ex.end > ex.begin) || ex.begin < 0.0 || ex.end > end) {
      fail(ErrorKind::InvalidInput, "exclusion interval must lie inside [0, end_time]");
    }
    if (ex.end - ex.begin > 0.5 * end) {
      fail(ErrorKind::ExclusionTooWide, "exclusion covers more than half of the trial");
    }
    for (double& t : times) {
      if (ex.contains(t)) t = (t - ex.begin <= ex.end - t) ? ex.begin : ex.end;
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) {
        fail(ErrorKind::ExclusionTooWide, "exclusion interval swallows more than one state time");
      }
    }
  }
  return times;
}

std::vector<StateAnchor> extract_states(const std::array<Series, 2>& channels,
                                        const StateTiming& timing) {
  const auto times = state_times(timing);
  for (const auto& s : channels) {
    if (s.size() < 2) fail(ErrorKind::SeriesTooShort, "mean series too short");
    const double step = (s.t.back() - s.t.front()) / static_cast<double>(s.size() - 1);
    if (s.t.front() > times.front() + 1e-9 || s.t.back() < times.back() - step) {
      fail(ErrorKind::InvalidInput, "mean series does not cover the state timing span");
    }
  }
  std::vector<StateAnchor> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.push_back({static_cast<int>(k) + 1, times[k],
                   {interpolate(channels[0], times[k]), interpolate(channels[1], times[k])}});
  }
  return out;
}

std::vector<StateAnchor> extract_states(const TrialAverage& mean, const StateTiming& timing) {
  return extract_states(std::array<Series, 2>{mean.channel_mean(0), mean.channel_mean(1)}, timing);
}

std::vector<FeaturePair> normalize_to_first_state(std::span<const FeaturePair> states, double floor) {
  if (states.empty()) fail(ErrorKind::InvalidInput, "no states to normalize");
  const FeaturePair ref = states.front();
  for (std::size_t c = 0; c < 2; ++c) {
    if (!(std::abs(ref[c]) >= floor)) {
      fail(ErrorKind::NearZeroReference, "state-1 value of channel " + std::to_string(c + 1) + " (" +
                                             detail::format_double(ref[c]) + ") below floor");
    }
  }
  std::vector<FeaturePair> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back({s[0] / ref[0], s[1] / ref[1]});
  return out;
}

std::optional<double> detect_end_time(const TrialAverage& mean, const EndDetection& options) {
  const std::size_t n = mean.t.size();
  if (n < 5) return std::nullopt;
  const double dt = (mean.t.back() - mean.t.front()) / static_cast<double>(n - 1);
  const auto half = static_cast<std::size_t>(std::lround(options.smoothing_seconds / dt / 2.0));
  const auto quiet_n = static_cast<std::size_t>(std::ceil(options.quiet_seconds / dt - 1e-9));

  std::array<std::vector<double>, 2> deriv;
  std::array<double, 2> peak{};
  std::size_t peak_at = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& v = mean.mean[c];
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n - 1, i + half);
      smooth[i] = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                  v.begin() + static_cast<std::ptrdiff_t>(hi + 1), 0.0) /
                  static_cast<double>(hi - lo + 1);
    }
    deriv[c].assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) deriv[c][i] = (smooth[i + 1] - smooth[i - 1]) / (2.0 * dt);
    deriv[c][0] = deriv[c][1];
    deriv[c][n - 1] = deriv[c][n - 2];
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(deriv[c][i]) > peak[c]) {
        peak[c] = std::abs(deriv[c][i]);
        arg = i;
      }
    }
    peak_at = std::max(peak_at, arg);
  }
  if (peak[0] == 0.0 && peak[1] == 0.0) return std::nullopt;

  auto quiet = [&](std::size_t i) {
    for (std::size_t c = 0; c < 2; ++c) {
      if (std::abs(deriv[c][i]) >= options.quiet_fraction * peak[c] && peak[c] > 0.0) return false;
    }
    return true;
  };
  std::size_t run = 0;
  for (std::size_t i = peak_at; i < n; ++i) {
    run = quiet(i) ? run + 1 : 0;
    if (run > quiet_n) return mean.t[i - quiet_n];
  }
  return std::nullopt;
}

Calibration calibrate(std::span<const TrialRecording> trials, const CalibrationOptions& options) {
  if (trials.empty()) fail(ErrorKind::InsufficientTrials, "no calibration trials");
  Calibration cal;

  std::vector<ProcessedTrial> processed;
  std::vector<std::array<Series, 2>> raw;
  std::vector<std::array<Series, 2>> deviations;
  for (const auto& tr : trials) {
    ProcessedTrial p{tr.meta, correct_trial(tr)};
    cal.clamped += p.signals.clamped;
    std::array<Series, 2> dev;
    for (std::size_t c = 0; c < 2; ++c) dev[c] = remove_offset(p.signals.ch[c], options.baseline_seconds);
    raw.push_back(p.signals.ch);
    deviations.push_back(std::move(dev));
    processed.push_back(std::move(p));
  }
  if (cal.clamped > 0) {
    cal.warnings.push_back(std::to_string(cal.clamped) +
                           " readings had ambient above emitter-on level and were clamped to 0");
  }

  if (processed.size() >= 2) {
    cal.average = average_trials(processed);
  } else {
    cal.warnings.push_back("single calibration trial: averaging reduces to the trial itself");
    cal.average = average_series(raw);
  }
  cal.deviation = average_series(deviations);

  StateTiming timing = options.timing;
  if (options.detect_end) {
    const auto end = detect_end_time(cal.average);
    if (!end) fail(ErrorKind::InvalidInput, "could not detect full contraction; supply end_time");
    timing.end_time = *end;
  }
  cal.end_time = timing.end_time;
  cal.anchors = extract_states(cal.average, timing);

  const double floor = options.reference_floor_fraction * options.adc_full_scale;
  for (const auto& p : processed) {
    std::vector<FeaturePair> raw_states;
    for (const auto& a : cal.anchors) {
      raw_states.push_back({interpolate(p.signals.ch[0], a.t), interpolate(p.signals.ch[1], a.t)});
    }
    std::vector<FeaturePair> norm;
    try {
      norm = normalize_to_first_state(raw_states, floor);
    } catch (const Error& e) {
      throw Error(e.kind(), "trial '" + p.meta.trial_id + "': " + e.message());
    }
    for (std::size_t k = 0; k < norm.size(); ++k) {
      cal.dataset.samples.push_back({norm[k], cal.anchors[k].state, p.meta.trial_id});
    }
    for (double t : cal.average.t) {
      if (timing.exclusion && timing.exclusion->contains(t)) continue;
      cal.manifold.push_back({interpolate(p.signals.ch[0], t) / raw_states[0][0],
                              interpolate(p.signals.ch[1], t) / raw_states[0][1]});
    }
  }
  return cal;
}

}  // namespace ribbon::signal
