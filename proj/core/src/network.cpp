#include "plb/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace plb {

namespace {

struct FlatTensor {
  Shape shape;
  std::vector<double> data;
};

[[noreturn]] void layer_error(std::size_t idx, const std::string& msg) {
  throw std::invalid_argument("layer " + std::to_string(idx) + ": " + msg);
}

Shape output_shape(const Layer& layer, const Shape& in, std::size_t idx) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    if (d->in < 1 || d->out < 1) layer_error(idx, "dense dims must be positive");
    if (in.count() != d->in) {
      layer_error(idx, "dense expects " + std::to_string(d->in) +
                           " inputs, got " + std::to_string(in.count()));
    }
    return Shape{d->out, 1, 1};
  }
  if (std::holds_alternative<ReluLayer>(layer)) return in;
  if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
    if (c->in_channels < 1 || c->out_channels < 1 || c->kernel < 1 ||
        c->stride < 1) {
      layer_error(idx, "conv dims must be positive");
    }
    if (in.channels != c->in_channels) {
      layer_error(idx, "conv expects " + std::to_string(c->in_channels) +
                           " channels, got " + std::to_string(in.channels));
    }
    if (in.height < c->kernel || in.width < c->kernel) {
      layer_error(idx, "conv kernel larger than its input");
    }
    const int oh = (in.height - c->kernel) / c->stride + 1;
    const int ow = (in.width - c->kernel) / c->stride + 1;
    return Shape{c->out_channels, oh, ow};
  }
  if (std::holds_alternative<FlattenLayer>(layer)) {
    return Shape{in.count(), 1, 1};
  }
  layer_error(idx, "unknown layer type");
}

int flat_index(const Shape& s, int c, int i, int j) {
  return (c * s.height + i) * s.width + j;
}

FlatTensor apply_layer(const Layer& layer, const FlatTensor& in,
                       std::size_t idx) {
  FlatTensor out;
  out.shape = output_shape(layer, in.shape, idx);
  out.data.assign(static_cast<std::size_t>(out.shape.count()), 0.0);
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    for (int o = 0; o < d->out; ++o) {
      double acc = d->bias[o];
      const double* w = d->weights.data() + static_cast<std::size_t>(o) * d->in;
      for (int i = 0; i < d->in; ++i) acc += w[i] * in.data[i];
      out.data[o] = acc;
    }
  } else if (std::holds_alternative<ReluLayer>(layer)) {
    for (std::size_t i = 0; i < in.data.size(); ++i) {
      out.data[i] = in.data[i] > 0 ? in.data[i] : 0.0;
    }
  } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
    const Shape& os = out.shape;
    const Shape& is = in.shape;
    for (int co = 0; co < os.channels; ++co) {
      for (int oi = 0; oi < os.height; ++oi) {
        for (int oj = 0; oj < os.width; ++oj) {
          double acc = c->bias[co];
          for (int ci = 0; ci < is.channels; ++ci) {
            for (int ki = 0; ki < c->kernel; ++ki) {
              for (int kj = 0; kj < c->kernel; ++kj) {
                const int wi =
                    ((co * is.channels + ci) * c->kernel + ki) * c->kernel + kj;
                acc += c->weights[wi] *
                       in.data[flat_index(is, ci, oi * c->stride + ki,
                                          oj * c->stride + kj)];
              }
            }
          }
          out.data[flat_index(os, co, oi, oj)] = acc;
        }
      }
    }
  } else {  // flatten
    out.data = in.data;
  }
  return out;
}

struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> bias;
};

// Gradient with respect to the layer input; parameter gradients accumulate
// into *acc when provided.
std::vector<double> backward_layer(const Layer& layer, const FlatTensor& in,
                                   const Shape& out_shape,
                                   std::span<const double> gout,
                                   LayerGrads* acc) {
  std::vector<double> gin(in.data.size(), 0.0);
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    for (int o = 0; o < d->out; ++o) {
      const double g = gout[o];
      const double* w = d->weights.data() + static_cast<std::size_t>(o) * d->in;
      for (int i = 0; i < d->in; ++i) gin[i] += g * w[i];
      if (acc != nullptr) {
        double* dw = acc->weights.data() + static_cast<std::size_t>(o) * d->in;
        for (int i = 0; i < d->in; ++i) dw[i] += g * in.data[i];
        acc->bias[o] += g;
      }
    }
  } else if (std::holds_alternative<ReluLayer>(layer)) {
    for (std::size_t i = 0; i < gin.size(); ++i) {
      gin[i] = in.data[i] > 0 ? gout[i] : 0.0;
    }
  } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
    const Shape& is = in.shape;
    for (int co = 0; co < out_shape.channels; ++co) {
      for (int oi = 0; oi < out_shape.height; ++oi) {
        for (int oj = 0; oj < out_shape.width; ++oj) {
          const double g = gout[flat_index(out_shape, co, oi, oj)];
          if (acc != nullptr) acc->bias[co] += g;
          for (int ci = 0; ci < is.channels; ++ci) {
            for (int ki = 0; ki < c->kernel; ++ki) {
              for (int kj = 0; kj < c->kernel; ++kj) {
                const int wi =
                    ((co * is.channels + ci) * c->kernel + ki) * c->kernel + kj;
                const int ii =
                    flat_index(is, ci, oi * c->stride + ki, oj * c->stride + kj);
                gin[ii] += g * c->weights[wi];
                if (acc != nullptr) acc->weights[wi] += g * in.data[ii];
              }
            }
          }
        }
      }
    }
  } else {  // flatten
    gin.assign(gout.begin(), gout.end());
  }
  return gin;
}

struct ForwardTrace {
  std::vector<FlatTensor> inputs;  // input of each layer
  FlatTensor output;
};

ForwardTrace run_forward(const Network& net, const Image& u) {
  if (net.layers.empty()) {
    throw std::invalid_argument("forward: network has no layers");
  }
  ForwardTrace tr;
  tr.inputs.reserve(net.layers.size());
  FlatTensor cur{u.shape(),
                 std::vector<double>(u.data().begin(), u.data().end())};
  for (std::size_t idx = 0; idx < net.layers.size(); ++idx) {
    tr.inputs.push_back(cur);
    cur = apply_layer(net.layers[idx], tr.inputs.back(), idx);
  }
  if (cur.shape.count() != net.class_count) {
    throw std::invalid_argument(
        "forward: network emits " + std::to_string(cur.shape.count()) +
        " values but declares " + std::to_string(net.class_count) + " classes");
  }
  tr.output = std::move(cur);
  return tr;
}

Image backprop_to_input(const Network& net, const ForwardTrace& tr,
                        std::vector<double> gout,
                        std::vector<LayerGrads>* accs) {
  for (std::size_t idx = net.layers.size(); idx-- > 0;) {
    const Shape out_shape = idx + 1 < net.layers.size()
                                ? tr.inputs[idx + 1].shape
                                : tr.output.shape;
    LayerGrads* acc = accs != nullptr ? &(*accs)[idx] : nullptr;
    gout = backward_layer(net.layers[idx], tr.inputs[idx], out_shape, gout, acc);
  }
  return Image(tr.inputs.front().shape, std::move(gout));
}

// Index of the k-th largest entry excluding class y; ties resolve toward
// the lower index so the subgradient choice is deterministic.
int kth_largest_rival(const std::vector<double>& vals, int y, int k) {
  std::vector<int> order;
  order.reserve(vals.size());
  for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
    if (i != y) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals[a] != vals[b]) return vals[a] > vals[b];
    return a < b;
  });
  return order[static_cast<std::size_t>(k) - 1];
}

void check_barrier_args(int classes, int y, int k_top) {
  if (classes < 2) {
    throw std::invalid_argument("barrier: need at least two classes");
  }
  if (y < 0 || y >= classes) {
    throw std::invalid_argument("barrier: label out of range");
  }
  if (k_top < 1 || k_top >= classes) {
    throw std::invalid_argument("barrier: k_top must lie in [1, classes-1]");
  }
}

std::vector<LayerGrads> make_accumulators(const Network& net) {
  std::vector<LayerGrads> accs(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (const auto* d = std::get_if<DenseLayer>(&net.layers[i])) {
      accs[i].weights.assign(d->weights.size(), 0.0);
      accs[i].bias.assign(d->bias.size(), 0.0);
    } else if (const auto* c = std::get_if<Conv2dLayer>(&net.layers[i])) {
      accs[i].weights.assign(c->weights.size(), 0.0);
      accs[i].bias.assign(c->bias.size(), 0.0);
    }
  }
  return accs;
}

void apply_update(Network& net, const std::vector<LayerGrads>& accs,
                  double scale) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (auto* d = std::get_if<DenseLayer>(&net.layers[i])) {
      for (std::size_t j = 0; j < d->weights.size(); ++j) {
        d->weights[j] -= scale * accs[i].weights[j];
      }
      for (std::size_t j = 0; j < d->bias.size(); ++j) {
        d->bias[j] -= scale * accs[i].bias[j];
      }
    } else if (auto* c = std::get_if<Conv2dLayer>(&net.layers[i])) {
      for (std::size_t j = 0; j < c->weights.size(); ++j) {
        c->weights[j] -= scale * accs[i].weights[j];
      }
      for (std::size_t j = 0; j < c->bias.size(); ++j) {
        c->bias[j] -= scale * accs[i].bias[j];
      }
    }
  }
}

}  // namespace

LogitVector forward(const Network& net, const Image& u) {
  return run_forward(net, u).output.data;
}

int predict(const Network& net, const Image& u) {
  const LogitVector z = forward(net, u);
  int best = 0;
  for (int i = 1; i < static_cast<int>(z.size()); ++i) {
    if (z[i] > z[best]) best = i;
  }
  return best;
}

std::vector<double> softmax(const LogitVector& z) {
  if (z.empty()) throw std::invalid_argument("softmax: empty input");
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> s(z.size());
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    s[i] = std::exp(z[i] - zmax);
    sum += s[i];
  }
  for (double& v : s) v /= sum;
  return s;
}

double barrier_value(const LogitVector& z, int y, int k_top, bool use_softmax) {
  check_barrier_args(static_cast<int>(z.size()), y, k_top);
  const std::vector<double> vals = use_softmax ? softmax(z) : z;
  const int rival = kth_largest_rival(vals, y, k_top);
  return vals[rival] - vals[y];
}

BarrierGradient grad_log_barrier(const Network& net, const Image& u, int y,
                                 int k_top, bool use_softmax) {
  const ForwardTrace tr = run_forward(net, u);
  check_barrier_args(net.class_count, y, k_top);
  const std::vector<double>& z = tr.output.data;
  const std::vector<double> vals = use_softmax ? softmax(z) : z;
  const int rival = kth_largest_rival(vals, y, k_top);
  const double barrier = vals[rival] - vals[y];
  if (!(barrier > 0)) {
    throw std::domain_error(
        "grad_log_barrier: barrier is not positive (point classifies as the "
        "true label)");
  }

  // d(-log F)/dvals = (e_y - e_rival) / F.
  std::vector<double> gvals(vals.size(), 0.0);
  gvals[rival] = -1.0 / barrier;
  gvals[y] = 1.0 / barrier;

  std::vector<double> gz;
  if (use_softmax) {
    // Chain through the (symmetric) softmax Jacobian diag(s) - s s^T.
    const std::vector<double>& s = vals;
    double dot = 0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += s[i] * gvals[i];
    gz.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      gz[i] = s[i] * (gvals[i] - dot);
    }
  } else {
    gz = std::move(gvals);
  }

  BarrierGradient res;
  res.barrier = barrier;
  res.gradient = backprop_to_input(net, tr, std::move(gz), nullptr);
  return res;
}

LossGradient grad_cross_entropy(const Network& net, const Image& u, int y) {
  const ForwardTrace tr = run_forward(net, u);
  if (y < 0 || y >= net.class_count) {
    throw std::invalid_argument("grad_cross_entropy: label out of range");
  }
  std::vector<double> s = softmax(tr.output.data);
  LossGradient res;
  res.loss = -std::log(std::max(s[y], 1e-300));
  s[y] -= 1.0;
  res.gradient = backprop_to_input(net, tr, std::move(s), nullptr);
  return res;
}

TrainReport train(Network& net, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& holdout,
                  const TrainConfig& cfg) {
  if (train_set.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0)) {
    throw std::invalid_argument("train: bad configuration");
  }
  for (const LabeledExample& ex : train_set) {
    if (ex.label < 0 || ex.label >= net.class_count) {
      throw std::invalid_argument("train: label out of range");
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  std::vector<LayerGrads> accs = make_accumulators(net);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (LayerGrads& a : accs) {
        std::fill(a.weights.begin(), a.weights.end(), 0.0);
        std::fill(a.bias.begin(), a.bias.end(), 0.0);
      }
      for (std::size_t pos = start; pos < stop; ++pos) {
        const LabeledExample& ex = train_set[order[pos]];
        const ForwardTrace tr = run_forward(net, ex.image);
        std::vector<double> s = softmax(tr.output.data);
        epoch_loss += -std::log(std::max(s[ex.label], 1e-300));
        s[ex.label] -= 1.0;
        backprop_to_input(net, tr, std::move(s), &accs);
      }
      apply_update(net, accs,
                   cfg.learning_rate / static_cast<double>(stop - start));
    }
    epoch_loss /= static_cast<double>(train_set.size());
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("train: loss became non-finite in epoch " +
                               std::to_string(epoch + 1));
    }
    report.epoch_loss.push_back(epoch_loss);
  }
  report.train_accuracy = accuracy(net, train_set);
  report.holdout_accuracy = holdout.empty() ? 0.0 : accuracy(net, holdout);
  return report;
}

double accuracy(const Network& net, const std::vector<LabeledExample>& data) {
  if (data.empty()) return 0.0;
  int hits = 0;
  for (const LabeledExample& ex : data) {
    if (predict(net, ex.image) == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

namespace {

constexpr char kMagic[4] = {'P', 'L', 'B', 'W'};
constexpr std::uint32_t kVersion = 1;
enum LayerCode : std::uint8_t { kDense = 0, kRelu = 1, kConv = 2, kFlatten = 3 };

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::ostream& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

std::uint8_t get_u8(std::istream& in) {
  const int c = in.get();
  if (c == EOF) throw std::runtime_error("load_weights: truncated file");
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(get_u8(in)) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(get_u8(in)) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

int checked_dim(std::uint32_t v, const char* what) {
  if (v == 0 || v > (1u << 24)) {
    throw std::runtime_error(std::string("load_weights: implausible ") + what);
  }
  return static_cast<int>(v);
}

}  // namespace

void save_weights(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const Layer& layer : net.layers) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      put_u8(out, kDense);
      put_u32(out, static_cast<std::uint32_t>(d->in));
      put_u32(out, static_cast<std::uint32_t>(d->out));
      for (double w : d->weights) put_f64(out, w);
      for (double b : d->bias) put_f64(out, b);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      put_u8(out, kRelu);
    } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
      put_u8(out, kConv);
      put_u32(out, static_cast<std::uint32_t>(c->in_channels));
      put_u32(out, static_cast<std::uint32_t>(c->out_channels));
      put_u32(out, static_cast<std::uint32_t>(c->kernel));
      put_u32(out, static_cast<std::uint32_t>(c->stride));
      for (double w : c->weights) put_f64(out, w);
      for (double b : c->bias) put_f64(out, b);
    } else {
      put_u8(out, kFlatten);
    }
  }
  if (!out) throw std::runtime_error("save_weights: write failed for " + path);
}

Network load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || !std::equal(magic, magic + 4, kMagic)) {
    throw std::runtime_error("load_weights: not a PLBW file: " + path);
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw std::runtime_error("load_weights: unsupported version " +
                             std::to_string(version));
  }
  Network net;
  const std::uint32_t layer_count = get_u32(in);
  if (layer_count > 1024) {
    throw std::runtime_error("load_weights: implausible layer count");
  }
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint8_t code = get_u8(in);
    switch (code) {
      case kDense: {
        DenseLayer d;
        d.in = checked_dim(get_u32(in), "dense input dim");
        d.out = checked_dim(get_u32(in), "dense output dim");
        d.weights.resize(static_cast<std::size_t>(d.in) * d.out);
        d.bias.resize(static_cast<std::size_t>(d.out));
        for (double& w : d.weights) w = get_f64(in);
        for (double& b : d.bias) b = get_f64(in);
        net.layers.emplace_back(std::move(d));
        break;
      }
      case kRelu:
        net.layers.emplace_back(ReluLayer{});
        break;
      case kConv: {
        Conv2dLayer c;
        c.in_channels = checked_dim(get_u32(in), "conv input channels");
        c.out_channels = checked_dim(get_u32(in), "conv output channels");
        c.kernel = checked_dim(get_u32(in), "conv kernel");
        c.stride = checked_dim(get_u32(in), "conv stride");
        c.weights.resize(static_cast<std::size_t>(c.out_channels) *
                         c.in_channels * c.kernel * c.kernel);
        c.bias.resize(static_cast<std::size_t>(c.out_channels));
        for (double& w : c.weights) w = get_f64(in);
        for (double& b : c.bias) b = get_f64(in);
        net.layers.emplace_back(std::move(c));
        break;
      }
      case kFlatten:
        net.layers.emplace_back(FlattenLayer{});
        break;
      default:
        throw std::runtime_error("load_weights: unknown layer code " +
                                 std::to_string(code));
    }
  }
  // The class count is the width of the final dense layer; the format does
  // not store it separately.
  net.class_count = 0;
  for (auto it = net.layers.rbegin(); it != net.layers.rend(); ++it) {
    if (const auto* d = std::get_if<DenseLayer>(&*it)) {
      net.class_count = d->out;
      break;
    }
  }
  if (net.class_count < 2) {
    throw std::runtime_error(
        "load_weights: network has no dense output layer");
  }
  return net;
}

namespace {

DenseLayer init_dense(int in, int out, std::mt19937_64& rng) {
  DenseLayer d;
  d.in = in;
  d.out = out;
  d.weights.resize(static_cast<std::size_t>(in) * out);
  d.bias.assign(static_cast<std::size_t>(out), 0.0);
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / in));
  for (double& w : d.weights) w = dist(rng);
  return d;
}

Conv2dLayer init_conv(int in_c, const ConvSpec& spec, std::mt19937_64& rng) {
  Conv2dLayer c;
  c.in_channels = in_c;
  c.out_channels = spec.out_channels;
  c.kernel = spec.kernel;
  c.stride = spec.stride;
  c.weights.resize(static_cast<std::size_t>(spec.out_channels) * in_c *
                   spec.kernel * spec.kernel);
  c.bias.assign(static_cast<std::size_t>(spec.out_channels), 0.0);
  const double fan_in = static_cast<double>(in_c) * spec.kernel * spec.kernel;
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (double& w : c.weights) w = dist(rng);
  return c;
}

}  // namespace

Network make_mlp(const Shape& input, const std::vector<int>& hidden,
                 int classes, std::uint64_t seed) {
  if (input.count() < 1 || classes < 2) {
    throw std::invalid_argument("make_mlp: bad input shape or class count");
  }
  std::mt19937_64 rng(seed);
  Network net;
  net.class_count = classes;
  net.layers.emplace_back(FlattenLayer{});
  int prev = input.count();
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("make_mlp: hidden dims must be >= 1");
    net.layers.emplace_back(init_dense(prev, h, rng));
    net.layers.emplace_back(ReluLayer{});
    prev = h;
  }
  net.layers.emplace_back(init_dense(prev, classes, rng));
  return net;
}

Network make_cnn(const Shape& input, const std::vector<ConvSpec>& convs,
                 const std::vector<int>& hidden, int classes,
                 std::uint64_t seed) {
  if (input.count() < 1 || classes < 2) {
    throw std::invalid_argument("make_cnn: bad input shape or class count");
  }
  std::mt19937_64 rng(seed);
  Network net;
  net.class_count = classes;
  Shape cur = input;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    Conv2dLayer c = init_conv(cur.channels, convs[i], rng);
    net.layers.emplace_back(c);
    cur = output_shape(net.layers.back(), cur, net.layers.size() - 1);
    net.layers.emplace_back(ReluLayer{});
  }
  net.layers.emplace_back(FlattenLayer{});
  int prev = cur.count();
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("make_cnn: hidden dims must be >= 1");
    net.layers.emplace_back(init_dense(prev, h, rng));
    net.layers.emplace_back(ReluLayer{});
    prev = h;
  }
  net.layers.emplace_back(init_dense(prev, classes, rng));
  return net;
}

}  // namespace plb
