#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <variant>

namespace taguchi::nn {

struct Sgd {
  double learning_rate = 1e-3;
};

struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using OptimizerConfig = std::variant<Sgd, Adam>;

inline double learning_rate(const OptimizerConfig& config) {
  return std::visit([](const auto& c) { return c.learning_rate; }, config);
}

template <typename Scalar>
struct OptimizerState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector first_moment;   // Adam m
  Vector second_moment;  // Adam v
  long step = 0;
};

/// SGD: w -= lr * g.
/// Adam: m = b1 m + (1 - b1) g; v = b2 v + (1 - b2) g^2;
///       w -= lr * m_hat / (sqrt(v_hat) + eps) with m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t).
/// Empty moment vectors are zero-initialised on first use.
template <typename Scalar>
void optimizer_step(Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> params,
                    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grads,
                    OptimizerState<Scalar>& state, const OptimizerConfig& config) {
  using Vector = typename OptimizerState<Scalar>::Vector;
  if (params.size() != grads.size()) throw std::invalid_argument("optimizer_step: parameter and gradient sizes differ");
  ++state.step;
  if (const auto* sgd = std::get_if<Sgd>(&config)) {
    params -= static_cast<Scalar>(sgd->learning_rate) * grads;
    return;
  }
  const auto& adam = std::get<Adam>(config);
  if (state.first_moment.size() == 0) state.first_moment = Vector::Zero(params.size());
  if (state.second_moment.size() == 0) state.second_moment = Vector::Zero(params.size());
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw std::invalid_argument("optimizer_step: optimizer state size differs from parameters");

  const Scalar b1 = static_cast<Scalar>(adam.beta1);
  const Scalar b2 = static_cast<Scalar>(adam.beta2);
  state.first_moment = b1 * state.first_moment + (Scalar(1) - b1) * grads;
  state.second_moment = b2 * state.second_moment + (Scalar(1) - b2) * grads.cwiseAbs2();
  const Scalar t = static_cast<Scalar>(state.step);
  const Scalar c1 = Scalar(1) - std::pow(b1, t);
  const Scalar c2 = Scalar(1) - std::pow(b2, t);
  params.array() -= static_cast<Scalar>(adam.learning_rate) * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + static_cast<Scalar>(adam.epsilon));
}

}  // namespace taguchi::nn
