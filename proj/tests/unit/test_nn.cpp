#include "taguchi/nn/activation.hpp"
#include "taguchi/nn/checkpoint.hpp"
#include "taguchi/nn/kernels.hpp"
#include "taguchi/nn/train.hpp"

#include "nn_oracles.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace taguchi;
using namespace taguchi::nn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Direct "same" convolution: out(f, y, x) = b_f + sum w(f, dy, dx, c) * in(y + dy - pt, x + dx - pl, c).
Eigen::MatrixXd naive_conv(const Eigen::MatrixXd& in, Index n, Index h, Index w, const Eigen::MatrixXd& weights,
                           Index kh, Index kw) {
  const Index c_in = in.rows(), filters = weights.rows();
  const Index pt = (kh - 1) / 2, pl = (kw - 1) / 2;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(filters, n * h * w);
  for (Index s = 0; s < n; ++s)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        for (Index f = 0; f < filters; ++f) {
          double acc = 0;
          for (Index dy = 0; dy < kh; ++dy)
            for (Index dx = 0; dx < kw; ++dx)
              for (Index c = 0; c < c_in; ++c) {
                const Index iy = y + dy - pt, ix = x + dx - pl;
                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                acc += weights(f, (dy * kw + dx) * c_in + c) * in(c, (s * h + iy) * w + ix);
              }
          out(f, (s * h + y) * w + x) = acc;
        }
  return out;
}

LabeledData toy_data(std::uint64_t seed, Index n) {
  util::Rng rng(seed);
  LabeledData data{Tensor(n, FeatureShape::spatial(6, 6, 1)), Eigen::RowVectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const bool bright = i % 2 == 0;
    data.labels(i) = bright ? 1.0 : -1.0;
    for (Index p = 0; p < 36; ++p) data.images.values()(0, i * 36 + p) = util::uniform(rng, 0.0, 1.0) + (bright ? 0.5 : 0.0);
  }
  return data;
}

}  // namespace

TEST_CASE("reference architecture: output shapes, parameter counts and names") {
  const auto spec = testing::reference_architecture();
  const auto shapes = infer_shapes(spec);
  const auto counts = count_params(spec);
  const auto& rows = testing::reference_rows();
  REQUIRE(shapes.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    INFO("layer " << i + 1);
    CHECK(to_string(shapes[i]) == rows[i].shape);
    CHECK(counts.per_layer[i] == rows[i].params);
  }
  CHECK(counts.total == testing::kReferenceTotal);
  CHECK(param_layout(spec).total == testing::kReferenceTotal);
  const auto names = layer_names(spec);
  CHECK(names.front() == "conv_1");
  CHECK(names[3] == "max_pooling_1");
  CHECK(names[14] == "flatten_1");
  CHECK(names.back() == "dense_1");
}

TEST_CASE("block_cnn with the 10-layer template and uniform 3x3 kernels") {
  const std::vector<int> blocks{3, 3, 2, 2};
  const std::vector<Index> widths{32, 64, 128, 256};
  const auto spec = block_cnn(FeatureShape::spatial(100, 100, 3), blocks, widths, 3, Activation::Relu6);
  std::vector<Index> filters;
  for (const auto& layer : spec.layers)
    if (const auto* conv = std::get_if<Conv2D>(&layer)) filters.push_back(conv->filters);
  CHECK(filters == std::vector<Index>{32, 32, 32, 64, 64, 64, 128, 128, 256, 256});
  const auto shapes = infer_shapes(spec);
  const auto reference = infer_shapes(testing::reference_architecture());
  CHECK(shapes == reference);
  // uniform 3x3 changes only the first block's counts
  CHECK(count_params(spec).per_layer[0] == 32 * (9 * 3 + 1));
}

TEST_CASE("infer_shapes rejects invalid chains") {
  CHECK_THROWS_AS(infer_shapes({FeatureShape::vector(4), {Conv2D{}}}), ShapeError);
  CHECK_THROWS_AS(infer_shapes({FeatureShape::spatial(1, 4, 1), {MaxPool2D{}}}), ShapeError);
  CHECK_THROWS_AS(infer_shapes({FeatureShape::spatial(4, 4, 1), {Dense{1}}}), ShapeError);
  CHECK_THROWS_AS(infer_shapes({FeatureShape::vector(4), {Flatten{}}}), ShapeError);
  CHECK_THROWS_AS(validate_classifier({FeatureShape::spatial(4, 4, 1), {Flatten{}, Dense{2}}}), ShapeError);
  CHECK(infer_shapes({FeatureShape::spatial(25, 25, 64), {MaxPool2D{}}})[0] == FeatureShape::spatial(12, 12, 64));
}

TEST_CASE("im2col times weights equals direct convolution") {
  util::Rng rng(5);
  for (auto [kh, kw] : {std::pair<Index, Index>{1, 1}, {2, 2}, {3, 3}, {2, 3}, {3, 1}}) {
    const Index n = 2, h = 5, w = 4, c = 3, f = 2;
    Eigen::MatrixXd in(c, n * h * w), weights(f, kh * kw * c), cols;
    for (Index i = 0; i < in.size(); ++i) in.data()[i] = util::uniform(rng, -1, 1);
    for (Index i = 0; i < weights.size(); ++i) weights.data()[i] = util::uniform(rng, -1, 1);
    kernels::im2col<double>(in, n, h, w, kh, kw, cols);
    const Eigen::MatrixXd fast = weights * cols;
    CHECK((fast - naive_conv(in, n, h, w, weights, kh, kw)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("col2im is the adjoint of im2col") {
  util::Rng rng(6);
  const Index n = 2, h = 5, w = 6, c = 2, kh = 3, kw = 2;
  Eigen::MatrixXd x(c, n * h * w), cols, y(kh * kw * c, n * h * w), back(c, n * h * w);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = util::uniform(rng, -1, 1);
  for (Index i = 0; i < y.size(); ++i) y.data()[i] = util::uniform(rng, -1, 1);
  kernels::im2col<double>(x, n, h, w, kh, kw, cols);
  kernels::col2im<double>(y, n, h, w, kh, kw, c, back);
  CHECK_THAT(cols.cwiseProduct(y).sum(), WithinAbs(x.cwiseProduct(back).sum(), 1e-10));
}

TEST_CASE("max pooling floors odd sizes, prefers the first maximum and routes gradients") {
  Eigen::MatrixXd in(1, 9);
  in << 1, 5, 2,  //
      5, 3, 0,    //
      9, 9, 9;
  Eigen::MatrixXd out;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> arg;
  kernels::max_pool_forward<double>(in, 1, 3, 3, out, arg);
  REQUIRE(out.cols() == 1);
  CHECK(out(0, 0) == 5);
  CHECK(arg(0, 0) == 1);
  Eigen::MatrixXd grad(1, 1), back;
  grad << 2.5;
  kernels::max_pool_backward<double>(grad, arg, 9, back);
  CHECK(back.sum() == 2.5);
  CHECK(back(0, 1) == 2.5);
}

TEST_CASE("activations and their gradient masks") {
  Eigen::ArrayXd z(5);
  z << -1, 0, 3, 6, 7;
  Eigen::ArrayXd expected6(5);
  expected6 << 0, 0, 3, 6, 6;
  CHECK((relu6(z) - expected6).abs().maxCoeff() == 0);
  CHECK(relu(z)(4) == 7);
  Eigen::ArrayXd mask6(5);
  mask6 << 0, 0, 1, 0, 0;
  CHECK((relu6_grad_mask(relu6(z)) - mask6).abs().maxCoeff() == 0);
  CHECK(relu_grad_mask(relu(z)).sum() == 3);
}

TEST_CASE("hinge and squared hinge losses") {
  Eigen::RowVectorXd scores(4), labels(4);
  scores << 2.0, 0.5, -0.5, 1.0;
  labels << 1, 1, 1, 1;
  const auto hinge = margin_loss(scores, labels, LossKind::Hinge);
  CHECK_THAT(hinge.value, WithinAbs((0 + 0.5 + 1.5 + 0) / 4, 1e-15));
  CHECK(hinge.gradient(0) == 0);
  CHECK(hinge.gradient(3) == 0);  // margin exactly 1
  CHECK_THAT(hinge.gradient(1), WithinAbs(-0.25, 1e-15));
  const auto sq = margin_loss(scores, labels, LossKind::SquaredHinge);
  CHECK_THAT(sq.value, WithinAbs((0.25 + 2.25) / 4, 1e-15));
  CHECK_THAT(sq.gradient(2), WithinAbs(-2 * 1.5 / 4, 1e-15));
  labels(0) = 0.5;
  CHECK_THROWS_AS(margin_loss(scores, labels, LossKind::Hinge), std::invalid_argument);
}

TEST_CASE("SGD step is exact") {
  Eigen::VectorXd w(3), g(3);
  w << 1.0, -2.0, 0.5;
  g << 0.25, -4.0, 0.0;
  OptimizerState<double> state;
  const Eigen::VectorXd expected = w - 0.1 * g;
  optimizer_step<double>(w, g, state, Sgd{0.1});
  CHECK((w - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Adam first step moves each weight by about lr") {
  util::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(5), g(5);
    for (Index i = 0; i < 5; ++i) {
      const double magnitude = std::pow(10.0, util::uniform(rng, -3.0, 2.0));
      g(i) = util::uniform01(rng) < 0.5 ? -magnitude : magnitude;
    }
    OptimizerState<double> state;
    optimizer_step<double>(w, g, state, Adam{1e-3});
    for (Index i = 0; i < 5; ++i) CHECK(std::abs(std::abs(w(i)) - 1e-3) < 1e-6);
    CHECK((w.array() * g.array() < 0).all());
  }
}

TEST_CASE("Adam matches the bias-corrected recurrences over several steps") {
  Eigen::VectorXd w(2), g(2);
  w << 0.3, -0.7;
  OptimizerState<double> state;
  double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {0.3, -0.7};
  const Adam adam{0.01};
  for (int t = 1; t <= 5; ++t) {
    g << 0.1 * t, -0.05 / t;
    optimizer_step<double>(w, g, state, adam);
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g(i);
      v[i] = 0.999 * v[i] + 0.001 * g(i) * g(i);
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK_THAT(w(0), WithinAbs(ref[0], 1e-14));
  CHECK_THAT(w(1), WithinAbs(ref[1], 1e-14));
}

TEST_CASE("analytic gradients agree with central differences on random tiny models") {
  util::Rng rng(util::mix_seed(2024, 5));
  double worst = 0;
  Index compared = 0, skipped = 0;
  for (int model = 0; model < 120; ++model) {
    const auto c = testing::random_case(rng);
    const auto result = testing::gradient_check(c);
    INFO("model " << model << " worst parameter " << result.worst_index);
    CHECK(result.max_relative_error < 1e-4);
    worst = std::max(worst, result.max_relative_error);
    compared += result.compared;
    skipped += result.skipped;
  }
  CHECK(worst < 1e-4);
  CHECK(skipped * 100 <= compared + skipped);
}

TEST_CASE("single and double precision forward passes agree") {
  util::Rng rng(3);
  const auto c = testing::random_case(rng);
  const auto d = forward(c.spec, c.params, c.batch, false);
  BasicTensor<float> batch(c.batch.batch(), c.batch.shape(), c.batch.values().cast<float>());
  const auto f = forward(c.spec, Eigen::VectorXf(c.params.cast<float>()), batch, false);
  CHECK((d.scores - f.scores.cast<double>()).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("forward rejects mismatched inputs") {
  util::Rng rng(4);
  const auto c = testing::random_case(rng);
  CHECK_THROWS_AS(forward(c.spec, Eigen::VectorXd(Eigen::VectorXd::Zero(c.params.size() + 1)), c.batch),
                  std::invalid_argument);
  Tensor wrong(1, FeatureShape::spatial(2, 2, 9));
  CHECK_THROWS_AS(forward(c.spec, c.params, wrong), ShapeError);
}

TEST_CASE("initialisation is seeded and bounded") {
  const auto spec = testing::reference_architecture();
  const auto a = init_params(spec, 11), b = init_params(spec, 11), c = init_params(spec, 12);
  CHECK(a == b);
  CHECK(a != c);
  const auto layout = param_layout(spec);
  const double bound = std::sqrt(6.0 / (2 * 2 * 3));
  CHECK(a.segment(0, layout.weight_count[0]).cwiseAbs().maxCoeff() <= bound);
  CHECK(a.segment(layout.weight_count[0], 32).isZero());
}

TEST_CASE("accuracy counts a zero score as the positive class") {
  Eigen::RowVectorXd scores(4), labels(4);
  scores << 0.0, -0.1, 0.2, 0.0;
  labels << 1, -1, -1, -1;
  CHECK(accuracy(scores, labels) == 0.5);
}

TEST_CASE("training is deterministic and records the best epoch") {
  const auto train_set = toy_data(1, 24), val_set = toy_data(2, 10);
  const std::vector<int> blocks{1};
  const std::vector<Index> widths{4};
  const auto spec = block_cnn(FeatureShape::spatial(6, 6, 1), blocks, widths, 3, Activation::Relu);
  TrainingConfig config;
  config.epochs = 12;
  config.optimizer = Adam{1e-2};
  config.batch_size = 8;
  config.seed = 77;
  const auto a = train(spec, train_set, val_set, config);
  const auto b = train(spec, train_set, val_set, config);
  REQUIRE(a.history.size() == 12);
  CHECK(a.history == b.history);
  CHECK(a.best_params == b.best_params);
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    const auto& m = a.history[e];
    CHECK(m.val_accuracy <= a.best.val_accuracy);
    if (m.val_accuracy == a.best.val_accuracy) {
      CHECK(m.val_loss >= a.best.val_loss);
      if (m.val_loss == a.best.val_loss) CHECK(e >= a.best_epoch);
    }
  }
  CHECK(a.history[a.best_epoch] == a.best);
  const auto check = evaluate(spec, a.best_params, val_set, config.loss, 8);
  CHECK_THAT(check.accuracy, WithinAbs(a.best.val_accuracy, 1e-12));
  CHECK_THAT(check.loss, WithinRel(a.best.val_loss, 1e-12));
  CHECK(a.best.val_accuracy >= 0.9);

  config.precision = Precision::Single;
  const auto s1 = train(spec, train_set, val_set, config);
  const auto s2 = train(spec, train_set, val_set, config);
  CHECK(s1.history == s2.history);
}

TEST_CASE("training rejects degenerate inputs") {
  const std::vector<int> blocks{1};
  const std::vector<Index> widths{2};
  const auto spec = block_cnn(FeatureShape::spatial(6, 6, 1), blocks, widths, 3, Activation::Relu);
  auto one_class = toy_data(1, 6);
  one_class.labels.setOnes();
  CHECK_THROWS_AS(train(spec, one_class, toy_data(2, 4), {}), TrainingError);
  CHECK_THROWS_AS(train(spec, toy_data(1, 6), LabeledData{}, {}), TrainingError);
  TrainingConfig zero;
  zero.epochs = 0;
  CHECK_THROWS_AS(train(spec, toy_data(1, 6), toy_data(2, 4), zero), TrainingError);
  CHECK(parse_precision("single") == Precision::Single);
  CHECK_THROWS_AS(parse_precision("half"), TrainingError);
}

TEST_CASE("checkpoints round trip and reject corrupt files") {
  namespace fs = std::filesystem;
  const auto spec = testing::reference_architecture();
  CHECK(spec_from_text(spec_to_text(spec)) == spec);
  const auto params = init_params(spec, 3);
  const fs::path path = fs::temp_directory_path() / "taguchi_ckpt_test.ckpt";
  save_checkpoint(path, spec, params);
  const auto loaded = load_checkpoint(path);
  CHECK(loaded.spec == spec);
  CHECK(loaded.params == params);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  fs::resize_file(path, 10);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  fs::remove(path);
  CHECK_THROWS_AS(spec_from_text("input 4 4 1\nconv 2 3 3 relu7\n"), std::exception);
}
