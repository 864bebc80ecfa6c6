#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "egogate/model.hpp"

namespace egogate {

struct LabeledExample {
  std::vector<double> features;
  int label = 0;  // 0 = no interaction, 1 = interaction
};

struct TrainConfig {
  double learning_rate = 3e-3;
  double weight_decay = 0.01;
  int epochs = 50;
  int batch_size = 64;
  std::array<double, 2> class_weights = {1.0, 1.0};
  std::uint64_t seed = 1337;
  // Adaptive-moment constants.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Head architecture (hidden layer widths and matching dropout rates).
  std::vector<int> hidden_dims = kDefaultHiddenDims;
  std::vector<double> dropout_rates = kDefaultDropoutRates;
};

/// Keep the dataset as-is and weight the loss per class.
struct ClassWeights {};
/// Synthesize minority examples by interpolating toward minority
/// nearest neighbors until the classes balance.
struct SmoteOversample {
  int k_neighbors = 5;
  std::uint64_t seed = 1337;
};
/// Subsample the majority class (without replacement) to the minority
/// count.
struct RandomUndersample {
  std::uint64_t seed = 1337;
};

using ResampleStrategy = std::variant<ClassWeights, SmoteOversample, RandomUndersample>;

/// Balanced scheme: w_k = N_total / (2 * N_k). Both classes required.
std::array<double, 2> compute_class_weights(std::span<const int> labels);

std::vector<LabeledExample> smote_oversample(const std::vector<LabeledExample>& dataset,
                                             int k_neighbors, std::uint64_t seed);

std::vector<LabeledExample> random_undersample(const std::vector<LabeledExample>& dataset,
                                               std::uint64_t seed);

struct TrainResult {
  ClassifierHead head;
  std::vector<double> epoch_loss;      // mean weighted CE per epoch
  double final_loss = 0.0;             // full-set loss of the stored (float32) parameters
  std::array<double, 2> class_weights = {1.0, 1.0};
  std::array<std::size_t, 2> original_counts = {0, 0};
  std::array<std::size_t, 2> trained_counts = {0, 0};
};

/// Mini-batch training with the decoupled-weight-decay adaptive-moment
/// update. With a resampling strategy the dataset is rebalanced once up
/// front and the loss weights stay at (1, 1); with ClassWeights the
/// configured weights apply. Deterministic per cfg.seed.
TrainResult train(const std::vector<LabeledExample>& dataset, const TrainConfig& cfg,
                  const ResampleStrategy& strategy);

struct HeadGradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
};

/// Mean weighted CE of a batch (rows of X), with optional deterministic
/// dropout. The gradient pass shares this exact evaluation path.
double batch_loss(const ClassifierHead& head, const Eigen::MatrixXd& X, std::span<const int> labels,
                  const std::array<double, 2>& class_weights, bool training = false,
                  std::uint64_t dropout_seed = 0);

/// Backpropagated gradients of batch_loss with respect to every
/// parameter, plus the loss itself.
std::pair<double, HeadGradients> batch_loss_and_gradients(
    const ClassifierHead& head, const Eigen::MatrixXd& X, std::span<const int> labels,
    const std::array<double, 2>& class_weights, bool training = false,
    std::uint64_t dropout_seed = 0);

}  // namespace egogate
