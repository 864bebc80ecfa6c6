#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "egogate/audio.hpp"
#include "egogate/features.hpp"
#include "egogate/trigger.hpp"

namespace egogate {

struct DenseLayer {
  Eigen::MatrixXd weight;  // rows = out, cols = in
  Eigen::VectorXd bias;
};

inline const std::vector<int> kDefaultHiddenDims = {256, 384, 192, 384};
inline const std::vector<double> kDefaultDropoutRates = {0.15, 0.2, 0.25, 0.2};

/// Dense classification head: input -> hidden stack with rectifier
/// activations and per-layer dropout (training only) -> 2 logits.
struct ClassifierHead {
  std::vector<DenseLayer> layers;
  std::vector<double> dropout_rates;  // one per hidden layer

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }
  std::vector<int> layer_dims() const;
  std::size_t parameter_count() const;

  /// He-normal initialized head, deterministic per seed.
  static ClassifierHead make(const std::vector<int>& dims, const std::vector<double>& dropout,
                             std::uint64_t seed);
  /// All-zero parameters (useful for degenerate checks).
  static ClassifierHead zeros(const std::vector<int>& dims, const std::vector<double>& dropout);

  /// Throws if any parameter is non-finite.
  void check_finite() const;
  /// Rounds every parameter through 32-bit float, the storage precision.
  void quantize_to_storage();
};

using Logits = std::array<double, 2>;

/// Affine + rectifier stack. Dropout masks are applied only when
/// `training` is set, drawn deterministically from dropout_seed with
/// inverted scaling (kept units multiplied by 1/(1-p)).
Logits forward(const ClassifierHead& head, std::span<const double> input, bool training = false,
               std::uint64_t dropout_seed = 0);

/// Stable two-class softmax (max subtraction); outputs sum to one.
std::array<double, 2> softmax2(const Logits& logits);

/// -w_y * log P(C_y | x) computed through log-sum-exp.
double weighted_ce_loss(const Logits& logits, int label, const std::array<double, 2>& class_weights);

/// Same loss from an already-computed probability of the true class.
double weighted_ce_loss_prob(double p_true, int label, const std::array<double, 2>& class_weights);

/// Mean weighted cross-entropy over a batch of logits.
double weighted_ce_loss_batch(const std::vector<Logits>& logits, std::span<const int> labels,
                              const std::array<double, 2>& class_weights);

/// Model container: magic "EGOGATE1", feature dim, layer dims, dropout
/// rates, then little-endian float32 parameters in layer order, row-major.
void save_model(const std::filesystem::path& path, const ClassifierHead& head);
ClassifierHead load_model(const std::filesystem::path& path);

/// One P(C1) sample per sliding window of a preprocessed (mono, 16 kHz,
/// normalized) clip.
ProbabilityTrace classify_trace(const ClassifierHead& head, const AudioClip& clip,
                                const WindowSpec& spec);

}  // namespace egogate
