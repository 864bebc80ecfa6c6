#include "egogate/features.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> step(std::cos(ang), std::sin(ang));
    for (size_t base = 0; base < n; base += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        auto u = a[base + k];
        auto v = a[base + k + len / 2] * w;
        a[base + k] = u + v;
        a[base + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

std::vector<double> hann_window(int len) {
  std::vector<double> w(static_cast<size_t>(len));
  for (int n = 0; n < len; ++n) {
    w[static_cast<size_t>(n)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / static_cast<double>(len));
  }
  return w;
}

}  // namespace

double MelFilterbank::hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelFilterbank::mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(int bands, double low_hz, double high_hz, int fft_size,
                             int sample_rate) {
  if (bands < 1 || low_hz < 0.0 || high_hz <= low_hz || fft_size < 2 || sample_rate <= 0) {
    throw std::invalid_argument("invalid mel filterbank parameters");
  }
  const double mel_lo = hz_to_mel(low_hz);
  const double mel_hi = hz_to_mel(high_hz);
  edges_hz_.resize(static_cast<size_t>(bands) + 2);
  for (int j = 0; j < bands + 2; ++j) {
    edges_hz_[static_cast<size_t>(j)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * j / static_cast<double>(bands + 1));
  }

  const int bins = fft_size / 2 + 1;
  bin_weights_.assign(static_cast<size_t>(bands), std::vector<double>(static_cast<size_t>(bins), 0.0));
  for (int b = 0; b < bands; ++b) {
    for (int k = 0; k < bins; ++k) {
      double hz = static_cast<double>(k) * sample_rate / fft_size;
      bin_weights_[static_cast<size_t>(b)][static_cast<size_t>(k)] = response_at_hz(b, hz);
    }
  }
}

double MelFilterbank::response_at_hz(int band, double hz) const {
  const double lo = edges_hz_[static_cast<size_t>(band)];
  const double c = edges_hz_[static_cast<size_t>(band) + 1];
  const double hi = edges_hz_[static_cast<size_t>(band) + 2];
  if (hz <= lo || hz >= hi) return 0.0;
  if (hz <= c) return (hz - lo) / (c - lo);
  return (hi - hz) / (hi - c);
}

const MelFilterbank& feature_filterbank() {
  static const MelFilterbank bank(kMelBands, kMelLowHz, kMelHighHz, kStftFftSize,
                                  kFeatureSampleRate);
  return bank;
}

FeatureVector extract_features(const AudioWindow& window) {
  if (window.sample_rate != kFeatureSampleRate) {
    throw std::invalid_argument("feature extraction requires " +
                                std::to_string(kFeatureSampleRate) + " Hz audio, got " +
                                std::to_string(window.sample_rate) + " Hz");
  }
  const auto n = window.samples.size();
  if (n < static_cast<size_t>(kStftFrameLen)) {
    throw std::invalid_argument("window too short for a 25 ms analysis frame");
  }
  const size_t frames = 1 + (n - kStftFrameLen) / kStftHopLen;

  static const std::vector<double> taper = hann_window(kStftFrameLen);
  const auto& bank = feature_filterbank();
  const int bins = kStftFftSize / 2 + 1;

  // Log band magnitudes, frame-major, for an exact two-pass mean/std.
  std::vector<double> log_bands(frames * kMelBands);
  std::vector<std::complex<double>> buf(kStftFftSize);
  std::vector<double> magnitude(static_cast<size_t>(bins));

  for (size_t f = 0; f < frames; ++f) {
    const size_t off = f * kStftHopLen;
    for (int i = 0; i < kStftFrameLen; ++i) {
      buf[static_cast<size_t>(i)] = {taper[static_cast<size_t>(i)] *
                                         static_cast<double>(window.samples[off + static_cast<size_t>(i)]),
                                     0.0};
    }
    for (int i = kStftFrameLen; i < kStftFftSize; ++i) buf[static_cast<size_t>(i)] = {0.0, 0.0};
    fft_radix2(buf);
    for (int k = 0; k < bins; ++k) magnitude[static_cast<size_t>(k)] = std::abs(buf[static_cast<size_t>(k)]);

    for (int b = 0; b < kMelBands; ++b) {
      const auto& w = bank.bin_weights()[static_cast<size_t>(b)];
      double energy = 0.0;
      for (int k = 0; k < bins; ++k) energy += w[static_cast<size_t>(k)] * magnitude[static_cast<size_t>(k)];
      log_bands[f * kMelBands + static_cast<size_t>(b)] = std::log(energy + kLogFloor);
    }
  }

  FeatureVector out;
  out.start_sec = window.start_sec;
  out.values.resize(kFeatureDim);
  for (int b = 0; b < kMelBands; ++b) {
    double mean = 0.0;
    double lo = log_bands[static_cast<size_t>(b)];
    double hi = lo;
    for (size_t f = 0; f < frames; ++f) {
      const double v = log_bands[f * kMelBands + static_cast<size_t>(b)];
      mean += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mean /= static_cast<double>(frames);
    // A constant band (e.g. silence at the log floor) has exactly zero
    // deviation; skip the second pass so division rounding cannot leak in.
    if (lo == hi) {
      out.values[static_cast<size_t>(b)] = lo;
      out.values[static_cast<size_t>(kMelBands + b)] = 0.0;
      continue;
    }
    double var = 0.0;
    for (size_t f = 0; f < frames; ++f) {
      double d = log_bands[f * kMelBands + static_cast<size_t>(b)] - mean;
      var += d * d;
    }
    var /= static_cast<double>(frames);
    out.values[static_cast<size_t>(b)] = mean;
    out.values[static_cast<size_t>(kMelBands + b)] = std::sqrt(var);
  }
  return out;
}

}  // namespace egogate
