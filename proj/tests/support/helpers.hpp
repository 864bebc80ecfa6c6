// Shared fixtures and independent oracles for the test suites. Everything here
// recomputes expected results by brute force so the library is never checked
// against itself.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egogate/audio.hpp"
#include "egogate/model.hpp"
#include "egogate/train.hpp"
#include "egogate/trigger.hpp"

namespace testsupport {

// ---- raw WAV construction (independent of the library's parser) ----

// RIFF/WAVE bytes with 16-bit PCM samples given directly as integers.
std::vector<uint8_t> wav_bytes_pcm16(const std::vector<int16_t>& interleaved, int channels,
                                     int sample_rate);
// RIFF/WAVE bytes with 32-bit float samples (format code 3).
std::vector<uint8_t> wav_bytes_float32(const std::vector<float>& interleaved, int channels,
                                       int sample_rate);
// Inserts an unrelated chunk (id + payload) between fmt and data.
std::vector<uint8_t> with_extra_chunk(std::vector<uint8_t> wav, const char id[4],
                                      const std::vector<uint8_t>& payload);

void write_file(const std::string& path, const std::vector<uint8_t>& bytes);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Float WAV on disk from an AudioClip, via the byte-level writer.
void write_clip_f32(const std::string& path, const egogate::AudioClip& clip);

// ---- signal fixtures ----

egogate::AudioClip make_tone(double freq_hz, double duration_sec, int sample_rate,
                             double amplitude = 0.5, int channels = 1);
egogate::AudioClip make_silence(double duration_sec, int sample_rate);

// ---- trigger oracles: paint a millisecond boolean timeline, extract runs ----

std::vector<egogate::ActivationInterval> oracle_fixed_trigger(const egogate::ProbabilityTrace& t,
                                                              double tau, double hold_sec);
std::vector<egogate::ActivationInterval> oracle_hysteresis(const egogate::ProbabilityTrace& t,
                                                           double tau_on, double tau_off);
// True when both lists have equal length and every boundary agrees within
// tol_sec.
bool intervals_close(const std::vector<egogate::ActivationInterval>& a,
                     const std::vector<egogate::ActivationInterval>& b, double tol_sec);

// Random trace on a fixed hop grid starting at t = 0.
egogate::ProbabilityTrace random_trace(uint64_t seed, size_t min_len, size_t max_len,
                                       double hop_sec);

// ---- gradient-check fixtures ----

struct GradCheckCase {
  egogate::ClassifierHead head;
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  std::array<double, 2> weights;
};

// Randomized head + batch whose hidden pre-activations all sit at least
// min_preact away from the ReLU kink, so finite differences are clean.
GradCheckCase make_gradcheck_case(uint64_t seed, const std::vector<int>& dims, int batch,
                                  double min_preact = 1e-3);

// Central finite differences of the batch loss with respect to every
// parameter.
egogate::HeadGradients numeric_gradients(const GradCheckCase& c, double h = 1e-4);

// Max relative error between analytic and numeric gradients
// (|a-n| / max(1, |a|, |n|)).
double max_grad_rel_error(const egogate::HeadGradients& analytic,
                          const egogate::HeadGradients& numeric);

// ---- synthetic classification corpus ----

// Two well-separated Gaussian blobs; class 1 is the majority. Generation
// asserts linear separability along the mean axis.
std::vector<egogate::LabeledExample> make_separable_corpus(size_t n, double minority_frac,
                                                           size_t dim, uint64_t seed);

// F1 for class c over (model, dataset) with argmax predictions.
double eval_f1(const egogate::ClassifierHead& head,
               const std::vector<egogate::LabeledExample>& dataset, int positive_class);

// ---- process helpers for CLI tests ----

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_command(const std::string& command);

// Fresh scratch directory under the current working directory; removed on
// destruction.
struct TempDir {
  std::string path;
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const;
};

}  // namespace testsupport
