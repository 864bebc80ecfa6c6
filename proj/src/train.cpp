#include "egogate/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t step_seed(uint64_t base, uint64_t step) {
  return splitmix64(base ^ splitmix64(step + 1));
}

std::array<std::size_t, 2> label_counts(const std::vector<LabeledExample>& dataset) {
  std::array<std::size_t, 2> counts = {0, 0};
  for (const auto& ex : dataset) {
    if (ex.label != 0 && ex.label != 1) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
    ++counts[static_cast<size_t>(ex.label)];
  }
  return counts;
}

struct BatchActivations {
  std::vector<Eigen::MatrixXd> pre;     // pre-activation per layer
  std::vector<Eigen::MatrixXd> post;    // post relu+dropout per hidden layer
  std::vector<Eigen::MatrixXd> masks;   // scaled dropout masks (empty when unused)
};

// Shared forward pass for the batch loss and its gradients; masks are a
// deterministic function of dropout_seed.
BatchActivations forward_batch(const ClassifierHead& head, const Eigen::MatrixXd& X, bool training,
                               uint64_t dropout_seed) {
  BatchActivations acts;
  std::mt19937_64 rng(dropout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const size_t hidden = head.layers.size() - 1;
  Eigen::MatrixXd h = X;
  for (size_t l = 0; l < head.layers.size(); ++l) {
    Eigen::MatrixXd z = h * head.layers[l].weight.transpose();
    z.rowwise() += head.layers[l].bias.transpose();
    acts.pre.push_back(z);
    if (l < hidden) {
      Eigen::MatrixXd a = z.cwiseMax(0.0);
      const double rate = head.dropout_rates[l];
      Eigen::MatrixXd mask;
      if (training && rate > 0.0) {
        const double keep = 1.0 - rate;
        mask.resize(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          for (Eigen::Index c = 0; c < a.cols(); ++c) {
            mask(r, c) = unit(rng) < keep ? 1.0 / keep : 0.0;
          }
        }
        a = a.cwiseProduct(mask);
      }
      acts.masks.push_back(std::move(mask));
      acts.post.push_back(a);
      h = acts.post.back();
    }
  }
  return acts;
}

double loss_from_logits(const Eigen::MatrixXd& logits, std::span<const int> labels,
                        const std::array<double, 2>& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double z0 = logits(i, 0);
    const double z1 = logits(i, 1);
    const double m = std::max(z0, z1);
    const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
    const int y = labels[static_cast<size_t>(i)];
    acc += -w[static_cast<size_t>(y)] * (logits(i, y) - lse);
  }
  return acc / static_cast<double>(logits.rows());
}

void check_train_inputs(const ClassifierHead& head, const Eigen::MatrixXd& X,
                        std::span<const int> labels) {
  if (X.rows() == 0 || static_cast<size_t>(X.rows()) != labels.size()) {
    throw std::invalid_argument("batch rows must match label count and be nonempty");
  }
  if (static_cast<int>(X.cols()) != head.input_dim()) {
    throw std::invalid_argument("batch feature dim does not match head input");
  }
}

}  // namespace

std::array<double, 2> compute_class_weights(std::span<const int> labels) {
  std::array<double, 2> counts = {0.0, 0.0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    counts[static_cast<size_t>(y)] += 1.0;
  }
  if (counts[0] == 0.0 || counts[1] == 0.0) {
    throw std::invalid_argument("class weights need both classes present");
  }
  const double total = counts[0] + counts[1];
  return {total / (2.0 * counts[0]), total / (2.0 * counts[1])};
}

std::vector<LabeledExample> smote_oversample(const std::vector<LabeledExample>& dataset,
                                             int k_neighbors, std::uint64_t seed) {
  const auto counts = label_counts(dataset);
  if (counts[0] == 0 || counts[1] == 0) {
    throw std::invalid_argument("oversampling needs both classes present");
  }
  if (counts[0] == counts[1]) return dataset;

  const int minority = counts[0] < counts[1] ? 0 : 1;
  std::vector<size_t> min_idx;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label == minority) min_idx.push_back(i);
  }
  const size_t m = min_idx.size();
  if (k_neighbors < 1 || static_cast<size_t>(k_neighbors) >= m) {
    throw std::invalid_argument("k_neighbors must be in [1, minority size)");
  }

  // k nearest minority neighbors per minority point, ties broken by index.
  std::vector<std::vector<size_t>> neighbors(m);
  for (size_t a = 0; a < m; ++a) {
    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(m - 1);
    const auto& xa = dataset[min_idx[a]].features;
    for (size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      const auto& xb = dataset[min_idx[b]].features;
      double d2 = 0.0;
      for (size_t j = 0; j < xa.size(); ++j) {
        const double d = xa[j] - xb[j];
        d2 += d * d;
      }
      dist.emplace_back(d2, b);
    }
    std::sort(dist.begin(), dist.end());
    neighbors[a].reserve(static_cast<size_t>(k_neighbors));
    for (int k = 0; k < k_neighbors; ++k) neighbors[a].push_back(dist[static_cast<size_t>(k)].second);
  }

  std::vector<LabeledExample> out = dataset;
  const size_t deficit = std::max(counts[0], counts[1]) - m;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick_base(0, m - 1);
  std::uniform_int_distribution<size_t> pick_nn(0, static_cast<size_t>(k_neighbors) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (size_t s = 0; s < deficit; ++s) {
    const size_t a = pick_base(rng);
    const size_t b = neighbors[a][pick_nn(rng)];
    const double u = unit(rng);
    const auto& xa = dataset[min_idx[a]].features;
    const auto& xb = dataset[min_idx[b]].features;
    LabeledExample synth;
    synth.label = minority;
    synth.features.resize(xa.size());
    for (size_t j = 0; j < xa.size(); ++j) {
      synth.features[j] = xa[j] + u * (xb[j] - xa[j]);
    }
    out.push_back(std::move(synth));
  }
  return out;
}

std::vector<LabeledExample> random_undersample(const std::vector<LabeledExample>& dataset,
                                               std::uint64_t seed) {
  const auto counts = label_counts(dataset);
  if (counts[0] == 0 || counts[1] == 0) {
    throw std::invalid_argument("undersampling needs both classes present");
  }
  if (counts[0] == counts[1]) return dataset;

  const int majority = counts[0] > counts[1] ? 0 : 1;
  const size_t target = std::min(counts[0], counts[1]);
  std::vector<size_t> maj_idx;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label == majority) maj_idx.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(maj_idx.begin(), maj_idx.end(), rng);
  maj_idx.resize(target);

  std::vector<bool> keep(dataset.size(), false);
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label != majority) keep[i] = true;
  }
  for (size_t i : maj_idx) keep[i] = true;

  std::vector<LabeledExample> out;
  out.reserve(2 * target);
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) out.push_back(dataset[i]);
  }
  return out;
}

double batch_loss(const ClassifierHead& head, const Eigen::MatrixXd& X, std::span<const int> labels,
                  const std::array<double, 2>& class_weights, bool training,
                  std::uint64_t dropout_seed) {
  check_train_inputs(head, X, labels);
  auto acts = forward_batch(head, X, training, dropout_seed);
  return loss_from_logits(acts.pre.back(), labels, class_weights);
}

std::pair<double, HeadGradients> batch_loss_and_gradients(
    const ClassifierHead& head, const Eigen::MatrixXd& X, std::span<const int> labels,
    const std::array<double, 2>& class_weights, bool training, std::uint64_t dropout_seed) {
  check_train_inputs(head, X, labels);
  auto acts = forward_batch(head, X, training, dropout_seed);
  const Eigen::MatrixXd& logits = acts.pre.back();
  const double loss = loss_from_logits(logits, labels, class_weights);

  const auto n = static_cast<double>(X.rows());
  Eigen::MatrixXd dz(logits.rows(), 2);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const auto probs = softmax2({logits(i, 0), logits(i, 1)});
    const int y = labels[static_cast<size_t>(i)];
    const double w = class_weights[static_cast<size_t>(y)];
    dz(i, 0) = w * (probs[0] - (y == 0 ? 1.0 : 0.0)) / n;
    dz(i, 1) = w * (probs[1] - (y == 1 ? 1.0 : 0.0)) / n;
  }

  HeadGradients grads;
  grads.weight.resize(head.layers.size());
  grads.bias.resize(head.layers.size());
  for (size_t li = head.layers.size(); li-- > 0;) {
    const Eigen::MatrixXd& input = li == 0 ? X : acts.post[li - 1];
    grads.weight[li] = dz.transpose() * input;
    grads.bias[li] = dz.colwise().sum().transpose();
    if (li == 0) break;
    Eigen::MatrixXd da = dz * head.layers[li].weight;
    if (acts.masks[li - 1].size() > 0) {
      da = da.cwiseProduct(acts.masks[li - 1]);
    }
    dz = da.cwiseProduct(
        (acts.pre[li - 1].array() > 0.0).cast<double>().matrix());
  }
  return {loss, std::move(grads)};
}

TrainResult train(const std::vector<LabeledExample>& dataset, const TrainConfig& cfg,
                  const ResampleStrategy& strategy) {
  if (dataset.empty()) throw std::invalid_argument("empty training set");
  const auto original_counts = label_counts(dataset);
  if (original_counts[0] == 0 || original_counts[1] == 0) {
    throw std::invalid_argument("training needs both classes present");
  }
  if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.learning_rate < 0.0 || cfg.weight_decay < 0.0) {
    throw std::invalid_argument("invalid training configuration");
  }
  const size_t dim = dataset.front().features.size();
  for (const auto& ex : dataset) {
    if (ex.features.size() != dim) {
      throw std::invalid_argument("feature dimension varies across the dataset");
    }
  }

  std::vector<LabeledExample> working;
  std::array<double, 2> weights = {1.0, 1.0};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ClassWeights>) {
          working = dataset;
          weights = cfg.class_weights;
        } else if constexpr (std::is_same_v<T, SmoteOversample>) {
          working = smote_oversample(dataset, s.k_neighbors, s.seed);
        } else {
          working = random_undersample(dataset, s.seed);
        }
      },
      strategy);
  const auto trained_counts = label_counts(working);

  const auto n = working.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::vector<int> labels(n);
  for (size_t i = 0; i < n; ++i) {
    labels[i] = working[i].label;
    for (size_t j = 0; j < dim; ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = working[i].features[j];
    }
  }

  std::vector<int> dims;
  dims.push_back(static_cast<int>(dim));
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(2);
  ClassifierHead head = ClassifierHead::make(dims, cfg.dropout_rates, cfg.seed);

  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (const auto& layer : head.layers) {
    mw.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    vw.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    mb.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
    vb.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }

  std::mt19937_64 shuffle_rng(splitmix64(cfg.seed));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  uint64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_acc = 0.0;
    for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(n, start + static_cast<size_t>(cfg.batch_size));
      const auto rows = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd Xb(rows, static_cast<Eigen::Index>(dim));
      std::vector<int> yb(static_cast<size_t>(rows));
      for (Eigen::Index r = 0; r < rows; ++r) {
        const size_t src = order[start + static_cast<size_t>(r)];
        Xb.row(r) = X.row(static_cast<Eigen::Index>(src));
        yb[static_cast<size_t>(r)] = labels[src];
      }

      auto [loss, grads] = batch_loss_and_gradients(head, Xb, yb, weights, /*training=*/true,
                                                    step_seed(cfg.seed, step));
      if (!std::isfinite(loss)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch + 1) + ", step " + std::to_string(step + 1));
      }
      ++step;
      const double t = static_cast<double>(step);
      const double bc1 = 1.0 - std::pow(cfg.beta1, t);
      const double bc2 = 1.0 - std::pow(cfg.beta2, t);
      for (size_t l = 0; l < head.layers.size(); ++l) {
        auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
          m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
          v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
          auto m_hat = m.array() / bc1;
          auto v_hat = v.array() / bc2;
          theta = (theta.array() - cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon) -
                   cfg.weight_decay * theta.array())
                      .matrix();
        };
        update(head.layers[l].weight, mw[l], vw[l], grads.weight[l]);
        update(head.layers[l].bias, mb[l], vb[l], grads.bias[l]);
      }
      epoch_acc += loss * static_cast<double>(rows);
    }
    result.epoch_loss.push_back(epoch_acc / static_cast<double>(n));
  }

  head.quantize_to_storage();
  result.final_loss = batch_loss(head, X, labels, weights, /*training=*/false, 0);
  result.head = std::move(head);
  result.class_weights = weights;
  result.original_counts = original_counts;
  result.trained_counts = trained_counts;
  return result;
}

}  // namespace egogate
