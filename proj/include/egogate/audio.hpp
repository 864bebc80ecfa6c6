#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace egogate {

/// A waveform in floating amplitude. Stereo clips keep their channels
/// interleaved (L, R, L, R, ...) until to_mono is applied.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 0;
  int channels = 1;

  std::size_t frame_count() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  double duration_sec() const {
    return sample_rate > 0 ? static_cast<double>(frame_count()) / sample_rate : 0.0;
  }
};

/// Sliding-window geometry in seconds. Hop must not exceed the window
/// duration (overlapping or abutting windows only).
struct WindowSpec {
  double window_sec = 4.0;
  double hop_sec = 2.0;
};

struct AudioWindow {
  std::size_t index = 0;
  double start_sec = 0.0;
  int sample_rate = 0;
  std::vector<float> samples;
};

/// White-noise injection parameters. Exactly one of `variance` and
/// `target_snr_db` must be set. Injection is deterministic per seed.
struct NoiseSpec {
  std::optional<double> variance;
  std::optional<double> target_snr_db;
  std::uint64_t seed = 0;
};

/// Reads a RIFF/WAVE file: PCM 16-bit or IEEE float 32-bit, 1 or 2 channels.
/// 16-bit samples are scaled by 1/32768. Stereo stays interleaved.
AudioClip load_wav(const std::filesystem::path& path);

/// Averages the two channels of a stereo clip. Mono input is returned
/// unchanged. More than two channels is rejected.
AudioClip to_mono(const AudioClip& clip);

/// Linear-interpolation resampling. Output holds round(duration * rate)
/// frames; the final sample is held when interpolation runs past the end.
/// A clip already at the target rate is returned unchanged.
AudioClip resample(const AudioClip& clip, int target_rate);

/// Scales samples by 1/max(|s|) when the clip is nonsilent; a silent clip
/// is returned unchanged.
AudioClip normalize_amplitude(const AudioClip& clip);

/// Slices a mono clip into windows starting at i * hop_sec for
/// i = 0 .. floor((duration - window) / hop). Every window holds exactly
/// round(window_sec * rate) samples; a tail shorter than the window is
/// dropped. Throws if the clip is shorter than one window.
std::vector<AudioWindow> slide_windows(const AudioClip& clip, const WindowSpec& spec);

/// Adds zero-mean Gaussian white noise. In variance mode the per-sample
/// variance is spec.variance; in SNR mode the noise is scaled so the
/// measured signal/noise power ratio hits target_snr_db. Output is
/// saturated to [-1, 1].
AudioClip add_white_noise(const AudioClip& clip, const NoiseSpec& spec);

}  // namespace egogate
