#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "plb/tensor.hpp"

namespace plb {

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // [out][in], row-major
  std::vector<double> bias;     // [out]
};

struct ReluLayer {};

// Valid (unpadded) convolution with square kernel.
struct Conv2dLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  std::vector<double> weights;  // [cout][cin][k][k]
  std::vector<double> bias;     // [cout]
};

struct FlattenLayer {};

using Layer = std::variant<DenseLayer, ReluLayer, Conv2dLayer, FlattenLayer>;

struct Network {
  std::vector<Layer> layers;
  int class_count = 0;
};

using LogitVector = std::vector<double>;

// Logits Z(u); no softmax applied. Throws std::invalid_argument when the
// input shape does not compose through the layers.
LogitVector forward(const Network& net, const Image& u);

// argmax of the logits; ties resolve to the lowest class index.
int predict(const Network& net, const Image& u);

std::vector<double> softmax(const LogitVector& z);

// Misclassification margin F: the k-th largest logit among classes != y,
// minus the logit of y. Positive exactly when the top-k set excluding y
// beats the true class. With use_softmax the same functional is applied to
// softmax outputs. Requires 1 <= k_top < class count.
double barrier_value(const LogitVector& z, int y, int k_top = 1,
                     bool use_softmax = false);

struct BarrierGradient {
  Image gradient;      // of -log F(u) with respect to u
  double barrier = 0;  // F(u)
};

// Exact backpropagation of -log F. Throws std::domain_error when F(u) <= 0
// (the iterate must be misclassified before calling).
BarrierGradient grad_log_barrier(const Network& net, const Image& u, int y,
                                 int k_top = 1, bool use_softmax = false);

struct LossGradient {
  Image gradient;
  double loss = 0;
};

// Softmax cross-entropy of class y and its input gradient.
LossGradient grad_cross_entropy(const Network& net, const Image& u, int y);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

struct TrainReport {
  double train_accuracy = 0.0;
  double holdout_accuracy = 0.0;  // 0 when holdout is empty
  std::vector<double> epoch_loss;
};

// Minibatch SGD on softmax cross-entropy. Deterministic given cfg.seed.
// Throws std::runtime_error naming the epoch if the loss turns non-finite.
TrainReport train(Network& net, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& holdout,
                  const TrainConfig& cfg);

double accuracy(const Network& net, const std::vector<LabeledExample>& data);

// Binary weight format "PLBW" v1, little-endian.
void save_weights(const Network& net, const std::string& path);
Network load_weights(const std::string& path);

// Architecture factories; weights are He-normal, biases zero, seeded.
Network make_mlp(const Shape& input, const std::vector<int>& hidden,
                 int classes, std::uint64_t seed);

struct ConvSpec {
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
};

Network make_cnn(const Shape& input, const std::vector<ConvSpec>& convs,
                 const std::vector<int>& hidden, int classes,
                 std::uint64_t seed);

}  // namespace plb
