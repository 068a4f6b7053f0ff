#include "taguchi/nn/train.hpp"

#include "taguchi/util/random.hpp"

#include <numeric>

namespace taguchi::nn {

LabeledData gather(const LabeledData& data, std::span<const Index> indices) {
  const FeatureShape shape = data.images.shape();
  const Index count = static_cast<Index>(indices.size());
  Tensor images(count, shape);
  Eigen::RowVectorXd labels(count);
  for (Index i = 0; i < count; ++i) {
    images.sample(i) = data.images.sample(indices[static_cast<std::size_t>(i)]);
    labels(i) = data.labels(indices[static_cast<std::size_t>(i)]);
  }
  return {std::move(images), std::move(labels)};
}

double accuracy(const Eigen::RowVectorXd& scores, const Eigen::RowVectorXd& labels) {
  if (scores.size() == 0) return 0.0;
  Index correct = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    const double predicted = scores(i) >= 0.0 ? 1.0 : -1.0;
    if (predicted == labels(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

namespace {

void check_data(const LabeledData& data, const char* what, bool need_both_classes) {
  if (data.size() == 0) throw TrainingError(std::string(what) + " set is empty");
  if (data.images.batch() != data.size())
    throw TrainingError(std::string(what) + " set has " + std::to_string(data.images.batch()) + " images but " +
                        std::to_string(data.size()) + " labels");
  if (((data.labels.array() != 1.0) && (data.labels.array() != -1.0)).any())
    throw TrainingError(std::string(what) + " labels must be -1 or +1");
  if (need_both_classes && ((data.labels.array() > 0).all() || (data.labels.array() < 0).all()))
    throw TrainingError(std::string(what) + " set contains a single class");
}

bool better(const EpochMetrics& a, const EpochMetrics& b) {
  if (a.val_accuracy != b.val_accuracy) return a.val_accuracy > b.val_accuracy;
  return a.val_loss < b.val_loss;
}

template <typename Scalar>
struct Batch {
  BasicTensor<Scalar> images;
  RowVector<Scalar> labels;
};

template <typename Scalar>
Batch<Scalar> gather_as(const LabeledData& data, std::span<const Index> indices) {
  const Index count = static_cast<Index>(indices.size());
  Batch<Scalar> batch{BasicTensor<Scalar>(count, data.images.shape()), RowVector<Scalar>(count)};
  for (Index i = 0; i < count; ++i) {
    const Index from = indices[static_cast<std::size_t>(i)];
    batch.images.sample(i) = data.images.sample(from).template cast<Scalar>();
    batch.labels(i) = static_cast<Scalar>(data.labels(from));
  }
  return batch;
}

template <typename Scalar>
Evaluation evaluate_as(const ModelSpec& spec, const Vector<Scalar>& params, const LabeledData& data, LossKind loss,
                       Index batch_size) {
  double loss_sum = 0, correct = 0;
  std::vector<Index> idx;
  for (Index start = 0; start < data.size(); start += batch_size) {
    const Index count = std::min(batch_size, data.size() - start);
    idx.resize(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), start);
    const auto batch = gather_as<Scalar>(data, idx);
    const auto pass = forward(spec, params, batch.images, false);
    loss_sum += static_cast<double>(margin_loss(pass.scores, batch.labels, loss).value) * static_cast<double>(count);
    correct += accuracy(pass.scores.template cast<double>(), data.labels.segment(start, count)) *
               static_cast<double>(count);
  }
  const double n = static_cast<double>(data.size());
  return {loss_sum / n, correct / n};
}

template <typename Scalar>
TrainResult train_as(const ModelSpec& spec, const LabeledData& train_data, const LabeledData& validation,
                     const TrainingConfig& config) {
  TrainResult result;
  Vector<Scalar> params = init_params(spec, util::mix_seed(config.seed, 0)).cast<Scalar>();
  util::Rng shuffle_rng(util::mix_seed(config.seed, 1));
  OptimizerState<Scalar> state;

  std::vector<Index> order(static_cast<std::size_t>(train_data.size()));
  std::iota(order.begin(), order.end(), Index{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    util::shuffle(std::span<Index>(order), shuffle_rng);
    double loss_sum = 0, correct = 0;
    for (Index start = 0; start < train_data.size(); start += config.batch_size) {
      const Index count = std::min(config.batch_size, train_data.size() - start);
      const auto batch = gather_as<Scalar>(
          train_data,
          std::span<const Index>(order).subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(count)));
      const auto pass = forward(spec, params, batch.images);
      const auto loss = margin_loss(pass.scores, batch.labels, config.loss);
      loss_sum += static_cast<double>(loss.value) * static_cast<double>(count);
      correct += accuracy(pass.scores.template cast<double>(), batch.labels.template cast<double>()) *
                 static_cast<double>(count);
      const Vector<Scalar> grads = backward(spec, params, pass, loss.gradient);
      optimizer_step<Scalar>(params, grads, state, config.optimizer);
    }
    if (!params.allFinite()) throw TrainingError("parameters diverged at epoch " + std::to_string(epoch + 1));

    const Evaluation val = evaluate_as(spec, params, validation, config.loss, config.batch_size);
    const double n = static_cast<double>(train_data.size());
    const EpochMetrics metrics{loss_sum / n, correct / n, val.loss, val.accuracy};
    result.history.push_back(metrics);
    if (epoch == 0 || better(metrics, result.best)) {
      result.best = metrics;
      result.best_epoch = static_cast<std::size_t>(epoch);
      result.best_params = params.template cast<double>();
    }
  }
  result.final_params = params.template cast<double>();
  return result;
}

}  // namespace

Evaluation evaluate(const ModelSpec& spec, const Eigen::VectorXd& params, const LabeledData& data, LossKind loss,
                    Index batch_size) {
  return evaluate_as<double>(spec, params, data, loss, batch_size);
}

std::string to_string(Precision precision) { return precision == Precision::Single ? "single" : "double"; }

Precision parse_precision(const std::string& name) {
  if (name == "single" || name == "float") return Precision::Single;
  if (name == "double") return Precision::Double;
  throw TrainingError("unknown precision '" + name + "'");
}

TrainResult train(const ModelSpec& spec, const LabeledData& train_data, const LabeledData& validation,
                  const TrainingConfig& config) {
  check_data(train_data, "training", true);
  check_data(validation, "validation", false);
  if (config.batch_size < 1) throw TrainingError("batch size must be >= 1");
  if (config.epochs < 1) throw TrainingError("epochs must be >= 1");
  if (!(learning_rate(config.optimizer) > 0)) throw TrainingError("learning rate must be > 0");
  validate_classifier(spec);
  if (config.precision == Precision::Single) return train_as<float>(spec, train_data, validation, config);
  return train_as<double>(spec, train_data, validation, config);
}

}  // namespace taguchi::nn
