#include "helpers.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace testsupport {

namespace {

void push_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(static_cast<uint8_t>(x & 0xff));
  v.push_back(static_cast<uint8_t>(x >> 8));
}

void push_u32(std::vector<uint8_t>& v, uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back(static_cast<uint8_t>((x >> (8 * i)) & 0xff));
}

void push_tag(std::vector<uint8_t>& v, const char* tag) {
  v.insert(v.end(), tag, tag + 4);
}

void patch_u32(std::vector<uint8_t>& v, size_t offset, uint32_t x) {
  for (int i = 0; i < 4; ++i) v[offset + i] = static_cast<uint8_t>((x >> (8 * i)) & 0xff);
}

std::vector<uint8_t> wav_bytes(int format, int bits, const uint8_t* data, size_t data_len,
                               int channels, int sample_rate) {
  std::vector<uint8_t> v;
  const int block = channels * bits / 8;
  push_tag(v, "RIFF");
  push_u32(v, static_cast<uint32_t>(36 + data_len));
  push_tag(v, "WAVE");
  push_tag(v, "fmt ");
  push_u32(v, 16);
  push_u16(v, static_cast<uint16_t>(format));
  push_u16(v, static_cast<uint16_t>(channels));
  push_u32(v, static_cast<uint32_t>(sample_rate));
  push_u32(v, static_cast<uint32_t>(sample_rate * block));
  push_u16(v, static_cast<uint16_t>(block));
  push_u16(v, static_cast<uint16_t>(bits));
  push_tag(v, "data");
  push_u32(v, static_cast<uint32_t>(data_len));
  v.insert(v.end(), data, data + data_len);
  return v;
}

// boolean ms-timeline helpers shared by the two trigger oracles
std::vector<egogate::ActivationInterval> extract_runs(const std::vector<char>& active) {
  std::vector<egogate::ActivationInterval> out;
  size_t i = 0;
  while (i < active.size()) {
    if (!active[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < active.size() && active[j]) ++j;
    out.push_back({static_cast<double>(i) / 1000.0, static_cast<double>(j) / 1000.0});
    i = j;
  }
  return out;
}

long long to_ms(double sec) { return std::llround(sec * 1000.0); }

}  // namespace

std::vector<uint8_t> wav_bytes_pcm16(const std::vector<int16_t>& interleaved, int channels,
                                     int sample_rate) {
  std::vector<uint8_t> data;
  data.reserve(interleaved.size() * 2);
  for (int16_t s : interleaved) push_u16(data, static_cast<uint16_t>(s));
  return wav_bytes(1, 16, data.data(), data.size(), channels, sample_rate);
}

std::vector<uint8_t> wav_bytes_float32(const std::vector<float>& interleaved, int channels,
                                       int sample_rate) {
  std::vector<uint8_t> data;
  data.reserve(interleaved.size() * 4);
  for (float s : interleaved) {
    uint32_t bits = 0;
    static_assert(sizeof(bits) == sizeof(s));
    std::memcpy(&bits, &s, 4);
    push_u32(data, bits);
  }
  return wav_bytes(3, 32, data.data(), data.size(), channels, sample_rate);
}

std::vector<uint8_t> with_extra_chunk(std::vector<uint8_t> wav, const char id[4],
                                      const std::vector<uint8_t>& payload) {
  // walk chunks to find "data"
  size_t offset = 12;
  while (offset + 8 <= wav.size()) {
    if (std::memcmp(wav.data() + offset, "data", 4) == 0) break;
    uint32_t len = 0;
    std::memcpy(&len, wav.data() + offset + 4, 4);
    offset += 8 + len + (len & 1);
  }
  std::vector<uint8_t> chunk;
  chunk.insert(chunk.end(), id, id + 4);
  push_u32(chunk, static_cast<uint32_t>(payload.size()));
  chunk.insert(chunk.end(), payload.begin(), payload.end());
  if (payload.size() & 1) chunk.push_back(0);
  wav.insert(wav.begin() + static_cast<std::ptrdiff_t>(offset), chunk.begin(), chunk.end());
  uint32_t riff_len = 0;
  std::memcpy(&riff_len, wav.data() + 4, 4);
  patch_u32(wav, 4, riff_len + static_cast<uint32_t>(chunk.size()));
  return wav;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_clip_f32(const std::string& path, const egogate::AudioClip& clip) {
  write_file(path, wav_bytes_float32(clip.samples, clip.channels, clip.sample_rate));
}

egogate::AudioClip make_tone(double freq_hz, double duration_sec, int sample_rate,
                             double amplitude, int channels) {
  egogate::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = channels;
  const auto frames = static_cast<size_t>(std::llround(duration_sec * sample_rate));
  clip.samples.reserve(frames * static_cast<size_t>(channels));
  for (size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const auto s =
        static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * t));
    for (int c = 0; c < channels; ++c) clip.samples.push_back(s);
  }
  return clip;
}

egogate::AudioClip make_silence(double duration_sec, int sample_rate) {
  egogate::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  clip.samples.assign(static_cast<size_t>(std::llround(duration_sec * sample_rate)), 0.0f);
  return clip;
}

std::vector<egogate::ActivationInterval> oracle_fixed_trigger(const egogate::ProbabilityTrace& t,
                                                              double tau, double hold_sec) {
  const long long hold_ms = to_ms(hold_sec);
  long long end_ms = 0;
  for (const auto& s : t.samples) end_ms = std::max(end_ms, to_ms(s.start_sec) + hold_ms);
  std::vector<char> active(static_cast<size_t>(end_ms + 2), 0);
  for (const auto& s : t.samples) {
    if (s.p < tau) continue;
    const long long a = to_ms(s.start_sec);
    for (long long m = a; m < a + hold_ms; ++m) active[static_cast<size_t>(m)] = 1;
  }
  return extract_runs(active);
}

std::vector<egogate::ActivationInterval> oracle_hysteresis(const egogate::ProbabilityTrace& t,
                                                           double tau_on, double tau_off) {
  const long long end_ms = to_ms(t.samples.back().start_sec) + to_ms(t.hop_sec);
  std::vector<char> active(static_cast<size_t>(end_ms), 0);
  bool state = false;
  size_t si = 0;
  for (long long m = 0; m < end_ms; ++m) {
    while (si < t.samples.size() && to_ms(t.samples[si].start_sec) == m) {
      const double p = t.samples[si].p;
      if (!state && p >= tau_on) {
        state = true;
      } else if (state && p < tau_off) {
        state = false;
      }
      ++si;
    }
    active[static_cast<size_t>(m)] = state ? 1 : 0;
  }
  return extract_runs(active);
}

bool intervals_close(const std::vector<egogate::ActivationInterval>& a,
                     const std::vector<egogate::ActivationInterval>& b, double tol_sec) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].start_sec - b[i].start_sec) > tol_sec) return false;
    if (std::abs(a[i].stop_sec - b[i].stop_sec) > tol_sec) return false;
  }
  return true;
}

egogate::ProbabilityTrace random_trace(uint64_t seed, size_t min_len, size_t max_len,
                                       double hop_sec) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> len_dist(min_len, max_len);
  std::uniform_real_distribution<double> p_dist(0.0, 1.0);
  egogate::ProbabilityTrace t;
  t.hop_sec = hop_sec;
  const size_t n = len_dist(rng);
  for (size_t i = 0; i < n; ++i) {
    t.samples.push_back({static_cast<double>(i) * hop_sec, p_dist(rng)});
  }
  return t;
}

GradCheckCase make_gradcheck_case(uint64_t seed, const std::vector<int>& dims, int batch,
                                  double min_preact) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const uint64_t s = seed + static_cast<uint64_t>(attempt) * 0x9e3779b97f4a7c15ull;
    std::mt19937_64 rng(s);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.5, 2.0);

    GradCheckCase c;
    std::vector<double> dropout(dims.size() - 2, 0.0);
    c.head = egogate::ClassifierHead::make(dims, dropout, s ^ 0xabcdefull);
    c.weights = {wdist(rng), wdist(rng)};
    for (int b = 0; b < batch; ++b) {
      std::vector<double> x(static_cast<size_t>(dims.front()));
      for (auto& v : x) v = normal(rng);
      c.inputs.push_back(std::move(x));
      c.labels.push_back(b % 2);
    }

    // reject draws with any hidden pre-activation near the ReLU kink
    bool clean = true;
    for (const auto& x : c.inputs) {
      Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
      for (size_t li = 0; li + 1 < c.head.layers.size() && clean; ++li) {
        Eigen::VectorXd z = c.head.layers[li].weight * h + c.head.layers[li].bias;
        if (z.array().abs().minCoeff() < min_preact) clean = false;
        h = z.cwiseMax(0.0);
      }
      if (!clean) break;
    }
    if (clean) return c;
  }
  throw std::runtime_error("no kink-free gradient-check draw found");
}

egogate::HeadGradients numeric_gradients(const GradCheckCase& c, double h) {
  const auto n = static_cast<long>(c.inputs.size());
  const auto dim = static_cast<long>(c.inputs.front().size());
  Eigen::MatrixXd X(n, dim);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < dim; ++j) X(i, j) = c.inputs[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  auto loss_at = [&](const egogate::ClassifierHead& head) {
    return egogate::batch_loss(head, X, c.labels, c.weights, false, 0);
  };
  egogate::HeadGradients g;
  egogate::ClassifierHead probe = c.head;
  for (auto& layer : probe.layers) {
    g.weight.emplace_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.emplace_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
  for (size_t li = 0; li < probe.layers.size(); ++li) {
    auto& W = probe.layers[li].weight;
    for (long r = 0; r < W.rows(); ++r) {
      for (long cidx = 0; cidx < W.cols(); ++cidx) {
        const double saved = W(r, cidx);
        W(r, cidx) = saved + h;
        const double up = loss_at(probe);
        W(r, cidx) = saved - h;
        const double dn = loss_at(probe);
        W(r, cidx) = saved;
        g.weight[li](r, cidx) = (up - dn) / (2.0 * h);
      }
    }
    auto& b = probe.layers[li].bias;
    for (long r = 0; r < b.size(); ++r) {
      const double saved = b(r);
      b(r) = saved + h;
      const double up = loss_at(probe);
      b(r) = saved - h;
      const double dn = loss_at(probe);
      b(r) = saved;
      g.bias[li](r) = (up - dn) / (2.0 * h);
    }
  }
  return g;
}

double max_grad_rel_error(const egogate::HeadGradients& analytic,
                          const egogate::HeadGradients& numeric) {
  double worst = 0.0;
  auto update = [&](double a, double n) {
    const double denom = std::max({1.0, std::abs(a), std::abs(n)});
    worst = std::max(worst, std::abs(a - n) / denom);
  };
  for (size_t li = 0; li < analytic.weight.size(); ++li) {
    for (long r = 0; r < analytic.weight[li].rows(); ++r) {
      for (long c = 0; c < analytic.weight[li].cols(); ++c) {
        update(analytic.weight[li](r, c), numeric.weight[li](r, c));
      }
    }
    for (long r = 0; r < analytic.bias[li].size(); ++r) {
      update(analytic.bias[li](r), numeric.bias[li](r));
    }
  }
  return worst;
}

std::vector<egogate::LabeledExample> make_separable_corpus(size_t n, double minority_frac,
                                                           size_t dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.25);
  const auto n_minority = static_cast<size_t>(std::llround(static_cast<double>(n) * minority_frac));
  const double shift = 1.2 / std::sqrt(static_cast<double>(dim));

  std::vector<egogate::LabeledExample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const int label = i < n_minority ? 0 : 1;
    const double mean = label == 1 ? shift : -shift;
    std::vector<double> x(dim);
    for (auto& v : x) v = mean + noise(rng);
    out.push_back({std::move(x), label});
  }

  // verify separability along the mean axis: max projection of class 0 below
  // min projection of class 1
  double max0 = -1e300, min1 = 1e300;
  for (const auto& ex : out) {
    double proj = 0.0;
    for (double v : ex.features) proj += v;
    proj /= std::sqrt(static_cast<double>(dim));
    if (ex.label == 0) {
      max0 = std::max(max0, proj);
    } else {
      min1 = std::min(min1, proj);
    }
  }
  if (max0 >= min1) throw std::runtime_error("corpus seed produced a non-separable draw");
  return out;
}

double eval_f1(const egogate::ClassifierHead& head,
               const std::vector<egogate::LabeledExample>& dataset, int positive_class) {
  long long tp = 0, fp = 0, fn = 0;
  for (const auto& ex : dataset) {
    const auto logits = egogate::forward(head, ex.features);
    const int pred = logits[1] > logits[0] ? 1 : 0;
    if (pred == positive_class && ex.label == positive_class) ++tp;
    if (pred == positive_class && ex.label != positive_class) ++fp;
    if (pred != positive_class && ex.label == positive_class) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

RunResult run_command(const std::string& command) {
  static std::atomic<int> counter{0};
  const int id = counter++;
  const std::string out_path = "cmd_out_" + std::to_string(id) + ".txt";
  const std::string err_path = "cmd_err_" + std::to_string(id) + ".txt";
  const std::string full = command + " > " + out_path + " 2> " + err_path;
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path = (fs::current_path() / ("scratch_" + tag + "_" + std::to_string(counter++))).string();
  fs::remove_all(path);
  fs::create_directories(path);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (fs::path(path) / name).string();
}

}  // namespace testsupport
