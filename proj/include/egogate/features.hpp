#pragma once

#include <vector>

#include "egogate/audio.hpp"

namespace egogate {

inline constexpr int kFeatureSampleRate = 16000;
inline constexpr int kMelBands = 64;
inline constexpr int kFeatureDim = 2 * kMelBands;  // per-band mean and std
inline constexpr int kStftFrameLen = 400;          // 25 ms at 16 kHz
inline constexpr int kStftHopLen = 160;            // 10 ms at 16 kHz
inline constexpr int kStftFftSize = 512;
inline constexpr double kMelLowHz = 125.0;
inline constexpr double kMelHighHz = 7500.0;
inline constexpr double kLogFloor = 1e-6;

/// Triangular mel filterbank over FFT magnitude bins.
class MelFilterbank {
 public:
  MelFilterbank(int bands, double low_hz, double high_hz, int fft_size, int sample_rate);

  int bands() const { return static_cast<int>(bin_weights_.size()); }
  double center_hz(int band) const { return edges_hz_[static_cast<size_t>(band) + 1]; }

  /// Triangle response of one filter at an arbitrary frequency (peak 1).
  double response_at_hz(int band, double hz) const;

  /// Per-band weights over the bins 0 .. fft_size/2.
  const std::vector<std::vector<double>>& bin_weights() const { return bin_weights_; }

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

 private:
  std::vector<double> edges_hz_;  // bands + 2 triangle corner frequencies
  std::vector<std::vector<double>> bin_weights_;
};

/// The shared filterbank used by extract_features.
const MelFilterbank& feature_filterbank();

struct FeatureVector {
  std::vector<double> values;
  double start_sec = 0.0;
};

/// Log-mel statistics of one 16 kHz window: 25 ms Hann frames with 10 ms
/// hop, 64 mel band magnitudes through log(x + 1e-6), then per-band mean
/// and standard deviation over frames (128 values total). Deterministic.
FeatureVector extract_features(const AudioWindow& window);

}  // namespace egogate
