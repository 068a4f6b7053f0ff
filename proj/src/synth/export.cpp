#include "taguchi/synth/dataset.hpp"

#include "taguchi/util/text.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace taguchi::synth {

namespace fs = std::filesystem;

void write_ppm(const fs::path& path, const ImageSample& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SynthError("cannot open '" + path.string() + "' for writing");
  out << "P6\n" << image.size << ' ' << image.size << "\n65535\n";
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(image.pixels.size()) * 2);
  for (Index j = 0; j < image.pixels.cols(); ++j) {
    for (Index c = 0; c < 3; ++c) {
      const auto v = static_cast<unsigned>(std::lround(std::clamp(image.pixels(c, j), 0.0, 1.0) * 65535.0));
      bytes.push_back(static_cast<char>(v >> 8));
      bytes.push_back(static_cast<char>(v & 0xFF));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw SynthError("failed writing '" + path.string() + "'");
}

namespace {

std::string next_token(std::istream& in) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

}  // namespace

ImageSample read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SynthError("cannot open '" + path.string() + "'");
  if (next_token(in) != "P6") throw SynthError("'" + path.string() + "' is not a binary PPM");
  long long width = 0, height = 0, maxval = 0;
  if (!util::parse_int(next_token(in), width) || !util::parse_int(next_token(in), height) ||
      !util::parse_int(next_token(in), maxval) || maxval < 1 || maxval > 65535)
    throw SynthError("bad PPM header in '" + path.string() + "'");
  if (width != height || width < 1) throw SynthError("'" + path.string() + "' is not square");
  const int bytes_per = maxval > 255 ? 2 : 1;
  std::string data(static_cast<std::size_t>(width * height * 3 * bytes_per), '\0');
  if (!in.read(data.data(), static_cast<std::streamsize>(data.size())))
    throw SynthError("'" + path.string() + "' is truncated");

  ImageSample image;
  image.size = width;
  image.pixels.resize(3, width * height);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  for (Index j = 0; j < image.pixels.cols(); ++j)
    for (Index c = 0; c < 3; ++c) {
      unsigned v = *p++;
      if (bytes_per == 2) v = (v << 8) | *p++;
      image.pixels(c, j) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  return image;
}

void export_dataset(const SplitDataset& data, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory / "images", ec);
  if (ec) throw SynthError("cannot create '" + (directory / "images").string() + "'");
  std::ofstream manifest(directory / "manifest.csv", std::ios::trunc);
  if (!manifest) throw SynthError("cannot write manifest in '" + directory.string() + "'");
  manifest << "filename,label,split,seed,defect,brightness,scale\n";
  auto emit = [&](const std::vector<ImageSample>& samples, const char* split) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "images/%s_%04zu.ppm", split, i);
      write_ppm(directory / name, samples[i]);
      const auto& p = samples[i].provenance;
      manifest << name << ',' << label_name(samples[i].label) << ',' << split << ',' << p.seed << ','
               << (p.defect ? defect_name(*p.defect) : "none") << ',' << util::format_double(p.brightness) << ','
               << util::format_double(p.scale) << '\n';
    }
  };
  emit(data.train, "train");
  emit(data.test, "test");
  if (!manifest.flush()) throw SynthError("failed writing manifest");
}

SplitDataset import_dataset(const fs::path& directory) {
  std::ifstream manifest(directory / "manifest.csv");
  if (!manifest) throw SynthError("no manifest.csv in '" + directory.string() + "'");
  std::string line;
  if (!std::getline(manifest, line)) throw SynthError("empty manifest");
  const auto header = util::split_csv(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required : {"filename", "label", "split"})
    if (!column.count(required)) throw SynthError(std::string("manifest lacks a '") + required + "' column");

  SplitDataset data;
  Index size = -1;
  int line_no = 1;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split_csv(line);
    if (fields.size() != header.size()) throw SynthError("manifest line " + std::to_string(line_no) + " is malformed");
    ImageSample image = read_ppm(directory / fields[column["filename"]]);
    if (size >= 0 && image.size != size) throw SynthError("manifest images differ in size");
    size = image.size;
    image.label = parse_label(fields[column["label"]]);
    if (column.count("seed") && !util::parse_uint(fields[column["seed"]], image.provenance.seed))
      throw SynthError("manifest: bad seed '" + fields[column["seed"]] + "'");
    if (column.count("defect") && fields[column["defect"]] != "none")
      image.provenance.defect = parse_defect(fields[column["defect"]]);
    if (column.count("brightness")) util::parse_double(fields[column["brightness"]], image.provenance.brightness);
    if (column.count("scale")) util::parse_double(fields[column["scale"]], image.provenance.scale);
    const std::string& split = fields[column["split"]];
    if (split == "train")
      data.train.push_back(std::move(image));
    else if (split == "test")
      data.test.push_back(std::move(image));
    else
      throw SynthError("manifest line " + std::to_string(line_no) + ": unknown split '" + split + "'");
  }
  const double total = static_cast<double>(data.train.size() + data.test.size());
  data.train_fraction = total > 0 ? static_cast<double>(data.train.size()) / total : 0.0;
  return data;
}

}  // namespace taguchi::synth
