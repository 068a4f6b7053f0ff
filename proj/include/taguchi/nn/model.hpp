#pragma once

#include "taguchi/nn/tensor.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace taguchi::nn {

enum class Activation { None, Relu, Relu6 };

/// "same" zero padding, stride 1.
struct Conv2D {
  Index filters = 1;
  Index kernel_h = 3;
  Index kernel_w = 3;
  Activation activation = Activation::Relu;
  friend bool operator==(const Conv2D&, const Conv2D&) = default;
};

/// 2x2 window, stride 2, floor on odd sizes.
struct MaxPool2D {
  friend bool operator==(const MaxPool2D&, const MaxPool2D&) = default;
};

struct Flatten {
  friend bool operator==(const Flatten&, const Flatten&) = default;
};

/// Linear output, no activation.
struct Dense {
  Index units = 1;
  friend bool operator==(const Dense&, const Dense&) = default;
};

using LayerSpec = std::variant<Conv2D, MaxPool2D, Flatten, Dense>;

struct ModelSpec {
  FeatureShape input;
  std::vector<LayerSpec> layers;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Output shape of every layer. Throws ShapeError on an invalid chain: convolution or
/// pooling on a flat input, pooling a spatial dim < 2, Dense before Flatten, or a
/// non-positive size.
std::vector<FeatureShape> infer_shapes(const ModelSpec& spec);

/// infer_shapes plus the classifier requirement: the last layer is Dense(1).
void validate_classifier(const ModelSpec& spec);

struct ParamCounts {
  std::vector<Index> per_layer;
  Index total = 0;
};

/// Conv: filters * (kh * kw * C_in + 1); Dense: units * (D_in + 1); others 0.
ParamCounts count_params(const ModelSpec& spec);

/// Keras-style names: conv_1, max_pooling_1, flatten_1, dense_1.
std::vector<std::string> layer_names(const ModelSpec& spec);

/// Blocks of same-width convolutions, each block followed by a 2x2 max pool, then
/// Flatten and Dense(1). convs_per_block and widths have equal length.
ModelSpec block_cnn(FeatureShape input, std::span<const int> convs_per_block, std::span<const Index> widths,
                    Index kernel, Activation activation);

std::string to_string(Activation activation);
Activation parse_activation(const std::string& name);

}  // namespace taguchi::nn
