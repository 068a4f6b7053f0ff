#pragma once

#include "taguchi/nn/model.hpp"

#include <cstdint>
#include <vector>

namespace taguchi::nn {

/// Offsets of each layer's weights and biases inside the flat parameter vector.
/// Conv weights are a (filters x kh*kw*C_in) column-major block, Dense weights
/// (units x D_in); each layer's biases follow its weights.
struct ParamLayout {
  std::vector<Index> offset;
  std::vector<Index> weight_count;
  std::vector<Index> bias_count;
  Index total = 0;
};

ParamLayout param_layout(const ModelSpec& spec);

/// He-style uniform weights in +-sqrt(6 / fan_in), zero biases.
Eigen::VectorXd init_params(const ModelSpec& spec, std::uint64_t seed);

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
struct BasicForwardPass {
  RowVector<Scalar> scores;                                                // (1 x N)
  std::vector<BasicTensor<Scalar>> activations;                            // [0] = input, [i+1] = output of layer i
  std::vector<Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>> argmax;  // pooling layers only
};
using ForwardPass = BasicForwardPass<double>;

/// Throws ShapeError when the batch does not match the model input or the model is
/// not a Dense(1) classifier, std::invalid_argument when params has the wrong size.
/// With keep_cache == false only the scores are retained.
/// Instantiated for float and double.
template <typename Scalar>
BasicForwardPass<Scalar> forward(const ModelSpec& spec, const Vector<Scalar>& params, const BasicTensor<Scalar>& batch,
                                 bool keep_cache = true);

/// Gradient of the loss with respect to every parameter, given d loss / d score.
template <typename Scalar>
Vector<Scalar> backward(const ModelSpec& spec, const Vector<Scalar>& params, const BasicForwardPass<Scalar>& pass,
                        const RowVector<Scalar>& score_grad);

}  // namespace taguchi::nn
