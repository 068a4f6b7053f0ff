#pragma once

#include "taguchi/nn/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace taguchi::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented model description:
///   input <h> <w> <c>
///   conv <filters> <kh> <kw> <none|relu|relu6>
///   maxpool
///   flatten
///   dense <units>
std::string spec_to_text(const ModelSpec& spec);
ModelSpec spec_from_text(const std::string& text);

struct Checkpoint {
  ModelSpec spec;
  Eigen::VectorXd params;
};

// Binary layout, all integers little-endian:
//   8 bytes  magic "TCNNCKPT"
//   u32      format version (1)
//   u32      byte length L of the spec text, then L bytes of spec_to_text()
//   u64      parameter count P, then P IEEE-754 binary64 values (little-endian)
void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const Eigen::VectorXd& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace taguchi::nn
