#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mseg/features.hpp"
#include "mseg/label.hpp"

namespace mseg {

struct CnnHyperparams {
    std::size_t filters = 250;
    std::size_t kernel_size = 3;
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// One conv layer (valid convolution, width-3 kernels) -> ReLU -> global
// max-pool -> dense -> softmax over the six event classes.
struct Cnn1dModel {
    std::size_t filters = 250;
    std::size_t kernel_size = 3;
    std::size_t input_len = kFeatureLen;
    std::size_t classes = kNumEventClasses;
    std::vector<double> conv_w;   // filters x kernel_size
    std::vector<double> conv_b;   // filters
    std::vector<double> dense_w;  // classes x filters
    std::vector<double> dense_b;  // classes

    std::size_t conv_out_len() const { return input_len - kernel_size + 1; }
};

// Same shapes as the model parameters.
struct CnnGradients {
    std::vector<double> conv_w, conv_b, dense_w, dense_b;
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean cross-entropy per epoch
    double final_train_accuracy = 0.0;
    std::uint64_t seed = 0;
};

using TrainingSet = std::vector<std::pair<FeatureVector, int>>;  // class in 0..5

Cnn1dModel cnn_init(const CnnHyperparams& hp, std::uint64_t seed);

std::array<double, kNumEventClasses> cnn_forward(const Cnn1dModel& model,
                                                 const FeatureVector& input);

// Analytic gradients of the mean cross-entropy over the batch; also returns
// the mean loss.
std::pair<CnnGradients, double> cnn_gradients(const Cnn1dModel& model,
                                              const TrainingSet& batch);

std::pair<Cnn1dModel, TrainReport> cnn_train(const TrainingSet& dataset, std::uint64_t seed,
                                             const CnnHyperparams& hp = {});

}  // namespace mseg
