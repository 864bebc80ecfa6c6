#include "egogate/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

constexpr char kModelMagic[8] = {'E', 'G', 'O', 'G', 'A', 'T', 'E', '1'};

void check_head_shape(const std::vector<int>& dims, const std::vector<double>& dropout) {
  if (dims.size() < 2) {
    throw std::invalid_argument("head needs at least input and output dims");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("layer dims must be positive");
  }
  if (dims.back() != 2) {
    throw std::invalid_argument("head output dimension must be 2");
  }
  if (dropout.size() != dims.size() - 2) {
    throw std::invalid_argument("need one dropout rate per hidden layer");
  }
  for (double p : dropout) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout rates must be in [0, 1)");
  }
}

void write_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f32(std::ofstream& out, float v) {
  uint32_t raw;
  std::memcpy(&raw, &v, 4);
  write_u32(out, raw);
}

uint32_t read_u32(std::ifstream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error("truncated model file while reading " + what);
  }
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

float read_f32(std::ifstream& in, const std::string& what) {
  uint32_t raw = read_u32(in, what);
  float v;
  std::memcpy(&v, &raw, 4);
  return v;
}

// Dropout rates are configuration, not trained parameters; they are stored at
// full precision so a load reproduces the head exactly.
void write_f64(std::ofstream& out, double v) {
  uint64_t raw;
  std::memcpy(&raw, &v, 8);
  write_u32(out, static_cast<uint32_t>(raw & 0xFFFFFFFFULL));
  write_u32(out, static_cast<uint32_t>(raw >> 32));
}

double read_f64(std::ifstream& in, const std::string& what) {
  const uint64_t lo = read_u32(in, what);
  const uint64_t hi = read_u32(in, what);
  const uint64_t raw = lo | (hi << 32);
  double v;
  std::memcpy(&v, &raw, 8);
  return v;
}

}  // namespace

std::vector<int> ClassifierHead::layer_dims() const {
  std::vector<int> dims;
  if (layers.empty()) return dims;
  dims.push_back(static_cast<int>(layers.front().weight.cols()));
  for (const auto& layer : layers) dims.push_back(static_cast<int>(layer.weight.rows()));
  return dims;
}

std::size_t ClassifierHead::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += static_cast<std::size_t>(layer.weight.size()) + static_cast<std::size_t>(layer.bias.size());
  }
  return n;
}

ClassifierHead ClassifierHead::make(const std::vector<int>& dims,
                                    const std::vector<double>& dropout, std::uint64_t seed) {
  check_head_shape(dims, dropout);
  ClassifierHead head;
  head.dropout_rates = dropout;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    const int in = dims[l];
    const int out = dims[l + 1];
    const double scale = std::sqrt(2.0 / in);
    layer.weight.resize(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weight(r, c) = scale * gauss(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    head.layers.push_back(std::move(layer));
  }
  return head;
}

ClassifierHead ClassifierHead::zeros(const std::vector<int>& dims,
                                     const std::vector<double>& dropout) {
  check_head_shape(dims, dropout);
  ClassifierHead head;
  head.dropout_rates = dropout;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.weight = Eigen::MatrixXd::Zero(dims[l + 1], dims[l]);
    layer.bias = Eigen::VectorXd::Zero(dims[l + 1]);
    head.layers.push_back(std::move(layer));
  }
  return head;
}

void ClassifierHead::check_finite() const {
  for (const auto& layer : layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw std::runtime_error("classifier head holds non-finite parameters");
    }
  }
}

void ClassifierHead::quantize_to_storage() {
  for (auto& layer : layers) {
    layer.weight = layer.weight.cast<float>().cast<double>();
    layer.bias = layer.bias.cast<float>().cast<double>();
  }
}

Logits forward(const ClassifierHead& head, std::span<const double> input, bool training,
               std::uint64_t dropout_seed) {
  if (head.layers.empty()) {
    throw std::invalid_argument("empty classifier head");
  }
  if (static_cast<int>(input.size()) != head.input_dim()) {
    throw std::invalid_argument("input dimension " + std::to_string(input.size()) +
                                " does not match head input " + std::to_string(head.input_dim()));
  }
  if (head.output_dim() != 2) {
    throw std::invalid_argument("head output dimension must be 2");
  }

  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(input.data(),
                                                        static_cast<Eigen::Index>(input.size()));
  std::mt19937_64 rng(dropout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const size_t hidden = head.layers.size() - 1;
  for (size_t l = 0; l < head.layers.size(); ++l) {
    h = head.layers[l].weight * h + head.layers[l].bias;
    if (l < hidden) {
      h = h.cwiseMax(0.0);
      const double rate = head.dropout_rates[l];
      if (training && rate > 0.0) {
        const double keep = 1.0 - rate;
        for (Eigen::Index i = 0; i < h.size(); ++i) {
          h(i) = unit(rng) < keep ? h(i) / keep : 0.0;
        }
      }
    }
  }
  Logits z{h(0), h(1)};
  if (!std::isfinite(z[0]) || !std::isfinite(z[1])) {
    throw std::runtime_error("forward pass produced non-finite logits");
  }
  return z;
}

std::array<double, 2> softmax2(const Logits& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

double weighted_ce_loss(const Logits& logits, int label,
                        const std::array<double, 2>& class_weights) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("label must be 0 or 1");
  }
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return -class_weights[static_cast<size_t>(label)] * (logits[static_cast<size_t>(label)] - lse);
}

double weighted_ce_loss_prob(double p_true, int label,
                             const std::array<double, 2>& class_weights) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("label must be 0 or 1");
  }
  if (p_true <= 0.0) {
    throw std::invalid_argument("probability of the true class must be positive");
  }
  return -class_weights[static_cast<size_t>(label)] * std::log(p_true);
}

double weighted_ce_loss_batch(const std::vector<Logits>& logits, std::span<const int> labels,
                              const std::array<double, 2>& class_weights) {
  if (logits.size() != labels.size() || logits.empty()) {
    throw std::invalid_argument("batch loss needs matching nonempty logits and labels");
  }
  double acc = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    acc += weighted_ce_loss(logits[i], labels[i], class_weights);
  }
  return acc / static_cast<double>(logits.size());
}

void save_model(const std::filesystem::path& path, const ClassifierHead& head) {
  head.check_finite();
  const auto dims = head.layer_dims();
  check_head_shape(dims, head.dropout_rates);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open model file for writing: " + path.string());
  }
  out.write(kModelMagic, 8);
  write_u32(out, static_cast<uint32_t>(dims.front()));
  write_u32(out, static_cast<uint32_t>(dims.size()));
  for (int d : dims) write_u32(out, static_cast<uint32_t>(d));
  write_u32(out, static_cast<uint32_t>(head.dropout_rates.size()));
  for (double p : head.dropout_rates) write_f64(out, p);
  for (const auto& layer : head.layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        write_f32(out, static_cast<float>(layer.weight(r, c)));
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      write_f32(out, static_cast<float>(layer.bias(r)));
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing model file: " + path.string());
  }
}

ClassifierHead load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path.string());
  }
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kModelMagic, 8) != 0) {
    throw std::runtime_error("bad model magic in " + path.string());
  }
  const uint32_t feature_dim = read_u32(in, "feature dim");
  const uint32_t n_dims = read_u32(in, "layer count");
  if (n_dims < 2 || n_dims > 64) {
    throw std::runtime_error("implausible layer count in " + path.string());
  }
  std::vector<int> dims(n_dims);
  for (auto& d : dims) {
    d = static_cast<int>(read_u32(in, "layer dim"));
    if (d < 1 || d > 1 << 20) {
      throw std::runtime_error("implausible layer dim in " + path.string());
    }
  }
  if (static_cast<uint32_t>(dims.front()) != feature_dim) {
    throw std::runtime_error("feature dim does not match first layer dim in " + path.string());
  }
  const uint32_t n_dropout = read_u32(in, "dropout count");
  if (n_dropout != n_dims - 2) {
    throw std::runtime_error("dropout count does not match hidden layers in " + path.string());
  }
  std::vector<double> dropout(n_dropout);
  for (auto& p : dropout) p = read_f64(in, "dropout rate");

  ClassifierHead head;
  head.dropout_rates = dropout;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.weight.resize(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = read_f32(in, "weight");
      }
    }
    layer.bias.resize(dims[l + 1]);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = read_f32(in, "bias");
    head.layers.push_back(std::move(layer));
  }
  check_head_shape(head.layer_dims(), head.dropout_rates);
  head.check_finite();
  return head;
}

ProbabilityTrace classify_trace(const ClassifierHead& head, const AudioClip& clip,
                                const WindowSpec& spec) {
  head.check_finite();
  ProbabilityTrace trace;
  trace.hop_sec = spec.hop_sec;
  for (const auto& window : slide_windows(clip, spec)) {
    FeatureVector fv = extract_features(window);
    Logits z = forward(head, fv.values, /*training=*/false);
    trace.samples.push_back({fv.start_sec, softmax2(z)[1]});
  }
  return trace;
}

}  // namespace egogate
