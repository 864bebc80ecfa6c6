#include "egogate/audio.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

void check_window_spec(const WindowSpec& spec) {
  if (spec.window_sec <= 0.0 || spec.hop_sec <= 0.0) {
    throw std::invalid_argument("window and hop durations must be positive");
  }
  if (spec.hop_sec > spec.window_sec) {
    throw std::invalid_argument("hop must not exceed window duration");
  }
}

double mean_square(const std::vector<float>& samples) {
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
}

}  // namespace

AudioClip to_mono(const AudioClip& clip) {
  if (clip.channels == 1) return clip;
  if (clip.channels != 2) {
    throw std::invalid_argument("to_mono supports at most 2 channels, got " +
                                std::to_string(clip.channels));
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.channels = 1;
  out.samples.resize(clip.frame_count());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = 0.5f * (clip.samples[2 * i] + clip.samples[2 * i + 1]);
  }
  return out;
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) {
    throw std::invalid_argument("target rate must be positive");
  }
  if (clip.sample_rate <= 0) {
    throw std::invalid_argument("clip has no sample rate");
  }
  if (target_rate == clip.sample_rate) return clip;

  const size_t in_frames = clip.frame_count();
  const auto out_frames = static_cast<size_t>(
      std::llround(static_cast<double>(in_frames) * target_rate / clip.sample_rate));
  const double step = static_cast<double>(clip.sample_rate) / target_rate;

  AudioClip out;
  out.sample_rate = target_rate;
  out.channels = clip.channels;
  out.samples.resize(out_frames * clip.channels);
  for (size_t j = 0; j < out_frames; ++j) {
    double pos = static_cast<double>(j) * step;
    auto lo = static_cast<size_t>(pos);
    if (lo >= in_frames - 1) {
      for (int c = 0; c < clip.channels; ++c) {
        out.samples[j * clip.channels + c] = clip.samples[(in_frames - 1) * clip.channels + c];
      }
      continue;
    }
    double frac = pos - static_cast<double>(lo);
    for (int c = 0; c < clip.channels; ++c) {
      double a = clip.samples[lo * clip.channels + c];
      double b = clip.samples[(lo + 1) * clip.channels + c];
      out.samples[j * clip.channels + c] = static_cast<float>(a + frac * (b - a));
    }
  }
  return out;
}

AudioClip normalize_amplitude(const AudioClip& clip) {
  float peak = 0.0f;
  for (float s : clip.samples) peak = std::max(peak, std::fabs(s));
  if (peak <= 0.0f) return clip;
  AudioClip out = clip;
  for (float& s : out.samples) s /= peak;
  return out;
}

std::vector<AudioWindow> slide_windows(const AudioClip& clip, const WindowSpec& spec) {
  check_window_spec(spec);
  if (clip.channels != 1) {
    throw std::invalid_argument("windowing requires a mono clip");
  }
  if (clip.sample_rate <= 0 || clip.samples.empty()) {
    throw std::invalid_argument("windowing requires a nonempty clip with a sample rate");
  }
  const size_t total = clip.samples.size();
  const auto window_len = static_cast<size_t>(std::llround(spec.window_sec * clip.sample_rate));
  if (window_len == 0) {
    throw std::invalid_argument("window shorter than one sample");
  }
  if (total < window_len) {
    throw std::runtime_error("clip too short to window: " + std::to_string(clip.duration_sec()) +
                             " s < " + std::to_string(spec.window_sec) + " s");
  }

  const double duration = clip.duration_sec();
  const auto last = static_cast<size_t>(
      std::floor((duration - spec.window_sec) / spec.hop_sec + 1e-9));

  std::vector<AudioWindow> windows;
  windows.reserve(last + 1);
  for (size_t i = 0; i <= last; ++i) {
    auto start = static_cast<size_t>(std::llround(static_cast<double>(i) * spec.hop_sec *
                                                  clip.sample_rate));
    start = std::min(start, total - window_len);
    AudioWindow w;
    w.index = i;
    w.start_sec = static_cast<double>(i) * spec.hop_sec;
    w.sample_rate = clip.sample_rate;
    w.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(start + window_len));
    windows.push_back(std::move(w));
  }
  return windows;
}

AudioClip add_white_noise(const AudioClip& clip, const NoiseSpec& spec) {
  if (spec.variance.has_value() == spec.target_snr_db.has_value()) {
    throw std::invalid_argument("exactly one of variance and target_snr_db must be set");
  }

  double noise_power = 0.0;
  if (spec.variance) {
    if (*spec.variance < 0.0) {
      throw std::invalid_argument("noise variance must be nonnegative");
    }
    if (*spec.variance == 0.0) return clip;
    noise_power = *spec.variance;
  } else {
    double signal_power = mean_square(clip.samples);
    if (signal_power <= 0.0) {
      throw std::invalid_argument("target_snr_db requires a nonsilent clip");
    }
    noise_power = signal_power / std::pow(10.0, *spec.target_snr_db / 10.0);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(clip.samples.size());
  for (double& n : noise) n = gauss(rng);

  double scale;
  if (spec.variance) {
    scale = std::sqrt(noise_power);
  } else {
    // SNR mode calibrates against the measured noise power, not the
    // distribution parameter, so the requested ratio holds on this draw.
    double measured = 0.0;
    for (double n : noise) measured += n * n;
    measured /= static_cast<double>(noise.size());
    scale = measured > 0.0 ? std::sqrt(noise_power / measured) : 0.0;
  }

  AudioClip out = clip;
  for (size_t i = 0; i < out.samples.size(); ++i) {
    double v = static_cast<double>(out.samples[i]) + scale * noise[i];
    out.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

}  // namespace egogate
