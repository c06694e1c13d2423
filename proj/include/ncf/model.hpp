#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ncf/adam.hpp"
#include "ncf/dataset.hpp"
#include "ncf/layers.hpp"

namespace ncf {

enum class ModelKind { classification, regression, binary, deepmf };

std::string kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

enum class RegressionTrunk { dot, mlp };

struct TrainConfig {
    int epochs = 15;
    int batch_size = 256;
    double learning_rate = 0.001;
    int embed_dim = 10;
    std::vector<int> hidden = {80, 25};
    double dropout = 0.4;
    std::uint64_t seed = 42;
    bool shuffle = true;
    RegressionTrunk regression_trunk = RegressionTrunk::dot;
    std::vector<int> deepmf_hidden = {128, 64};
    int binary_theta = 4;  // relevancy threshold used to binarize labels

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double test_metric = 0.0;  // accuracy (classification/binary) or MAE
    double seconds = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

// One of the four Table-style architectures with its parameters and
// optimizer state. Single writer: the owning training loop. Forward-only
// inference on a frozen graph is safe from multiple threads.
class ModelGraph {
  public:
    virtual ~ModelGraph() = default;

    ModelKind kind;
    int num_users = 0, num_items = 0, v_max = 0;
    TrainConfig cfg;
    AdamState adam;
    std::mt19937_64 dropout_rng;

    // Rows of the output: batch x V (classification), batch x 1 otherwise.
    virtual Matrix forward(std::span<const int> users, std::span<const int> items,
                           bool train) = 0;
    // Upstream is the loss gradient at the logits; accumulates parameter grads.
    virtual void backward(const Matrix& out_grad) = 0;
    virtual std::vector<ParamRef> params() = 0;
    virtual std::vector<std::pair<std::string, Matrix*>> named_tensors() = 0;

    std::size_t param_count();

    // Single-pair inference (dropout off). Classification: V probabilities.
    std::vector<double> predict_dist(int user, int item);
    // Regression family: output clamped to [1, v_max]. Binary: probability.
    double predict_scalar(int user, int item);
};

std::unique_ptr<ModelGraph> build_classification(int num_users, int num_items,
                                                 int v_max, const TrainConfig& cfg);
std::unique_ptr<ModelGraph> build_regression(int num_users, int num_items, int v_max,
                                             const TrainConfig& cfg);
std::unique_ptr<ModelGraph> build_binary(int num_users, int num_items, int v_max,
                                         int theta, const TrainConfig& cfg);
// DeepMF towers consume each user's train-partition rating row over items and
// each item's rating column over users.
std::unique_ptr<ModelGraph> build_deepmf(int num_users, int num_items, int v_max,
                                         std::span<const Interaction> train,
                                         const TrainConfig& cfg);

std::unique_ptr<ModelGraph> build_model(ModelKind kind, int num_users, int num_items,
                                        int v_max, std::span<const Interaction> train,
                                        const TrainConfig& cfg);

// One pass over the train data in seeded mini-batches; returns the mean
// per-sample loss.
double train_epoch(ModelGraph& model, std::span<const Interaction> train,
                   const TrainConfig& cfg, std::mt19937_64& shuffle_rng);

// Loss (and accuracy / MAE) on a frozen snapshot with dropout off.
std::pair<double, double> evaluate_loss(ModelGraph& model,
                                        std::span<const Interaction> data);

TrainHistory fit(ModelGraph& model, const SplitDataset& split, const TrainConfig& cfg);

void write_train_log(const std::string& path, const TrainHistory& history);

}  // namespace ncf
