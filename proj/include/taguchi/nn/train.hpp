#pragma once

#include "taguchi/nn/loss.hpp"
#include "taguchi/nn/network.hpp"
#include "taguchi/nn/optimizer.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

namespace taguchi::nn {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Images with +-1 targets (+1 = defective).
struct LabeledData {
  Tensor images;
  Eigen::RowVectorXd labels;

  Index size() const { return labels.size(); }
};

/// Samples at the given positions, in that order.
LabeledData gather(const LabeledData& data, std::span<const Index> indices);

/// Arithmetic used by train(). Metrics, checkpoints and returned parameters are double
/// either way.
enum class Precision { Double, Single };

std::string to_string(Precision precision);
Precision parse_precision(const std::string& name);

struct TrainingConfig {
  OptimizerConfig optimizer = Adam{};
  LossKind loss = LossKind::SquaredHinge;
  Index batch_size = 32;
  int epochs = 30;
  std::uint64_t seed = 0;
  Precision precision = Precision::Double;
};

struct EpochMetrics {
  double train_loss = 0;
  double train_accuracy = 0;
  double val_loss = 0;
  double val_accuracy = 0;
  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct Evaluation {
  double loss = 0;
  double accuracy = 0;
};

/// Fraction of samples whose sign(score) matches the label; a score of 0 counts as +1.
double accuracy(const Eigen::RowVectorXd& scores, const Eigen::RowVectorXd& labels);

Evaluation evaluate(const ModelSpec& spec, const Eigen::VectorXd& params, const LabeledData& data, LossKind loss,
                    Index batch_size);

struct TrainResult {
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;  // 0-based index into history
  EpochMetrics best;
  Eigen::VectorXd best_params;
  Eigen::VectorXd final_params;
};

/// Mini-batch training with seeded initialisation and per-epoch shuffling. Train metrics
/// are running averages over the epoch's batches (before each update); validation
/// metrics are computed after the epoch. The best epoch has maximum validation
/// accuracy, then lowest validation loss, then comes first.
/// Throws TrainingError for an empty train or validation set or a single-class train set.
TrainResult train(const ModelSpec& spec, const LabeledData& train_data, const LabeledData& validation,
                  const TrainingConfig& config);

}  // namespace taguchi::nn
