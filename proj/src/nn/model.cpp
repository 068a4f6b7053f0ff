#include "taguchi/nn/model.hpp"

#include <type_traits>

namespace taguchi::nn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string where(std::size_t i) { return "layer " + std::to_string(i + 1) + ": "; }

}  // namespace

std::vector<FeatureShape> infer_shapes(const ModelSpec& spec) {
  if (spec.input.size() <= 0) throw ShapeError("model input " + to_string(spec.input) + " is empty");
  std::vector<FeatureShape> shapes;
  FeatureShape current = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    current = std::visit(
        overloaded{
            [&](const Conv2D& conv) {
              if (current.flat) throw ShapeError(where(i) + "convolution on flat input " + to_string(current));
              if (conv.filters < 1 || conv.kernel_h < 1 || conv.kernel_w < 1)
                throw ShapeError(where(i) + "convolution filters and kernel dims must be >= 1");
              return FeatureShape::spatial(current.height, current.width, conv.filters);
            },
            [&](const MaxPool2D&) {
              if (current.flat) throw ShapeError(where(i) + "pooling on flat input " + to_string(current));
              if (current.height < 2 || current.width < 2)
                throw ShapeError(where(i) + "pooling on " + to_string(current) + " needs spatial dims >= 2");
              return FeatureShape::spatial(current.height / 2, current.width / 2, current.channels);
            },
            [&](const Flatten&) {
              if (current.flat) throw ShapeError(where(i) + "flatten on already flat input " + to_string(current));
              return FeatureShape::vector(current.size());
            },
            [&](const Dense& dense) {
              if (!current.flat) throw ShapeError(where(i) + "dense on spatial input " + to_string(current) + "; flatten first");
              if (dense.units < 1) throw ShapeError(where(i) + "dense units must be >= 1");
              return FeatureShape::vector(dense.units);
            },
        },
        spec.layers[i]);
    shapes.push_back(current);
  }
  return shapes;
}

void validate_classifier(const ModelSpec& spec) {
  infer_shapes(spec);
  if (spec.layers.empty()) throw ShapeError("model has no layers");
  const auto* last = std::get_if<Dense>(&spec.layers.back());
  if (last == nullptr || last->units != 1) throw ShapeError("the last layer must be Dense(1)");
}

ParamCounts count_params(const ModelSpec& spec) {
  const auto shapes = infer_shapes(spec);
  ParamCounts counts;
  FeatureShape in = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    Index n = 0;
    if (const auto* conv = std::get_if<Conv2D>(&spec.layers[i]))
      n = conv->filters * (conv->kernel_h * conv->kernel_w * in.channels + 1);
    else if (const auto* dense = std::get_if<Dense>(&spec.layers[i]))
      n = dense->units * (in.size() + 1);
    counts.per_layer.push_back(n);
    counts.total += n;
    in = shapes[i];
  }
  return counts;
}

std::vector<std::string> layer_names(const ModelSpec& spec) {
  int conv = 0, pool = 0, flat = 0, dense = 0;
  std::vector<std::string> names;
  for (const auto& layer : spec.layers) {
    names.push_back(std::visit(overloaded{
                                   [&](const Conv2D&) { return "conv_" + std::to_string(++conv); },
                                   [&](const MaxPool2D&) { return "max_pooling_" + std::to_string(++pool); },
                                   [&](const Flatten&) { return "flatten_" + std::to_string(++flat); },
                                   [&](const Dense&) { return "dense_" + std::to_string(++dense); },
                               },
                               layer));
  }
  return names;
}

ModelSpec block_cnn(FeatureShape input, std::span<const int> convs_per_block, std::span<const Index> widths,
                    Index kernel, Activation activation) {
  if (convs_per_block.size() != widths.size())
    throw ShapeError("block_cnn: " + std::to_string(convs_per_block.size()) + " block sizes for " +
                     std::to_string(widths.size()) + " widths");
  ModelSpec spec{input, {}};
  for (std::size_t b = 0; b < widths.size(); ++b) {
    for (int i = 0; i < convs_per_block[b]; ++i) spec.layers.emplace_back(Conv2D{widths[b], kernel, kernel, activation});
    spec.layers.emplace_back(MaxPool2D{});
  }
  spec.layers.emplace_back(Flatten{});
  spec.layers.emplace_back(Dense{1});
  return spec;
}

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::None: return "none";
    case Activation::Relu: return "relu";
    case Activation::Relu6: return "relu6";
  }
  return "none";
}

Activation parse_activation(const std::string& name) {
  if (name == "none") return Activation::None;
  if (name == "relu") return Activation::Relu;
  if (name == "relu6") return Activation::Relu6;
  throw ShapeError("unknown activation '" + name + "'");
}

}  // namespace taguchi::nn
