#include "egogate/audio.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

uint16_t read_u16le(const std::vector<uint8_t>& b, size_t off) {
  return static_cast<uint16_t>(b[off] | (b[off + 1] << 8));
}

uint32_t read_u32le(const std::vector<uint8_t>& b, size_t off) {
  return static_cast<uint32_t>(b[off]) | (static_cast<uint32_t>(b[off + 1]) << 8) |
         (static_cast<uint32_t>(b[off + 2]) << 16) | (static_cast<uint32_t>(b[off + 3]) << 24);
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open WAV file: " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
  size_t data_off = 0;
  size_t data_len = 0;
  bool have_data = false;

  size_t off = 12;
  while (off + 8 <= bytes.size()) {
    char id[5] = {0};
    std::memcpy(id, bytes.data() + off, 4);
    uint32_t chunk_len = read_u32le(bytes, off + 4);
    size_t body = off + 8;
    if (body + chunk_len > bytes.size()) {
      throw std::runtime_error("truncated chunk '" + std::string(id) + "' in " + path.string());
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        throw std::runtime_error("malformed fmt chunk in " + path.string());
      }
      format = read_u16le(bytes, body);
      channels = read_u16le(bytes, body + 2);
      sample_rate = read_u32le(bytes, body + 4);
      bits_per_sample = read_u16le(bytes, body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
      have_data = true;
    }
    off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) {
    throw std::runtime_error("missing fmt chunk: " + path.string());
  }
  if (!have_data) {
    throw std::runtime_error("missing data chunk: " + path.string());
  }
  if (data_len == 0) {
    throw std::runtime_error("zero-length data chunk: " + path.string());
  }
  if (format != kFormatPcm && format != kFormatIeeeFloat) {
    throw std::runtime_error("unsupported WAV codec (format tag " + std::to_string(format) +
                             "): " + path.string());
  }
  if (channels < 1 || channels > 2) {
    throw std::runtime_error("unsupported channel count " + std::to_string(channels) + ": " +
                             path.string());
  }
  if (sample_rate == 0) {
    throw std::runtime_error("zero sample rate: " + path.string());
  }
  if (format == kFormatPcm && bits_per_sample != 16) {
    throw std::runtime_error("unsupported PCM bit depth " + std::to_string(bits_per_sample) +
                             ": " + path.string());
  }
  if (format == kFormatIeeeFloat && bits_per_sample != 32) {
    throw std::runtime_error("unsupported float bit depth " + std::to_string(bits_per_sample) +
                             ": " + path.string());
  }

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.channels = channels;

  if (format == kFormatPcm) {
    size_t count = data_len / 2;
    clip.samples.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      uint16_t raw = read_u16le(bytes, data_off + 2 * i);
      auto value = static_cast<int16_t>(raw);
      clip.samples.push_back(static_cast<float>(value) / 32768.0f);
    }
  } else {
    size_t count = data_len / 4;
    clip.samples.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      uint32_t raw = read_u32le(bytes, data_off + 4 * i);
      float value;
      std::memcpy(&value, &raw, 4);
      clip.samples.push_back(value);
    }
  }
  // Drop a trailing partial frame so interleaving stays aligned.
  clip.samples.resize(clip.samples.size() - clip.samples.size() % channels);
  if (clip.samples.empty()) {
    throw std::runtime_error("data chunk holds no complete frame: " + path.string());
  }
  return clip;
}

}  // namespace egogate
