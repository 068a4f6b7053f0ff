#include "taguchi/nn/checkpoint.hpp"

#include "taguchi/nn/network.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace taguchi::nn {

namespace {

constexpr char kMagic[8] = {'T', 'C', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw CheckpointError("checkpoint truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

std::string spec_to_text(const ModelSpec& spec) {
  std::ostringstream out;
  out << "input " << spec.input.height << ' ' << spec.input.width << ' ' << spec.input.channels << '\n';
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<Conv2D>(&layer))
      out << "conv " << conv->filters << ' ' << conv->kernel_h << ' ' << conv->kernel_w << ' '
          << to_string(conv->activation) << '\n';
    else if (std::holds_alternative<MaxPool2D>(layer))
      out << "maxpool\n";
    else if (std::holds_alternative<Flatten>(layer))
      out << "flatten\n";
    else
      out << "dense " << std::get<Dense>(layer).units << '\n';
  }
  return out.str();
}

ModelSpec spec_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ModelSpec spec;
  bool have_input = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    auto fail = [&] { return CheckpointError("model description line " + std::to_string(line_no) + ": '" + line + "'"); };
    if (kind == "input") {
      Index h = 0, w = 0, c = 0;
      if (!(fields >> h >> w >> c)) throw fail();
      spec.input = FeatureShape::spatial(h, w, c);
      have_input = true;
    } else if (kind == "conv") {
      Conv2D conv;
      std::string act;
      if (!(fields >> conv.filters >> conv.kernel_h >> conv.kernel_w >> act)) throw fail();
      try {
        conv.activation = parse_activation(act);
      } catch (const ShapeError&) {
        throw fail();
      }
      spec.layers.emplace_back(conv);
    } else if (kind == "maxpool") {
      spec.layers.emplace_back(MaxPool2D{});
    } else if (kind == "flatten") {
      spec.layers.emplace_back(Flatten{});
    } else if (kind == "dense") {
      Dense dense;
      if (!(fields >> dense.units)) throw fail();
      spec.layers.emplace_back(dense);
    } else {
      throw fail();
    }
  }
  if (!have_input) throw CheckpointError("model description has no input line");
  return spec;
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const Eigen::VectorXd& params) {
  if (param_layout(spec).total != params.size())
    throw CheckpointError("parameter count " + std::to_string(params.size()) + " does not match the model");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  const std::string text = spec_to_text(spec);
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(params.size()));
  for (Index i = 0; i < params.size(); ++i) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(params(i)));
  if (!out.flush()) throw CheckpointError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path.string() + "'");
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw CheckpointError("'" + path.string() + "' is not a checkpoint");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto length = get_le<std::uint32_t>(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), length)) throw CheckpointError("checkpoint truncated");
  Checkpoint ckpt;
  ckpt.spec = spec_from_text(text);
  const auto count = get_le<std::uint64_t>(in);
  if (static_cast<Index>(count) != param_layout(ckpt.spec).total)
    throw CheckpointError("checkpoint holds " + std::to_string(count) + " parameters for a model of " +
                          std::to_string(param_layout(ckpt.spec).total));
  ckpt.params.resize(static_cast<Index>(count));
  for (Index i = 0; i < ckpt.params.size(); ++i) ckpt.params(i) = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return ckpt;
}

}  // namespace taguchi::nn
