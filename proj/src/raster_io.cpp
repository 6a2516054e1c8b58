#include "riskgrid/raster_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "riskgrid/error.hpp"
#include "text_util.hpp"

namespace riskgrid {

namespace {

constexpr std::size_t kMagicSize = 6;
constexpr std::size_t kHeaderSize = kMagicSize + 4 * 4;

struct Header {
  std::uint32_t width;
  std::uint32_t height;
  std::uint32_t num_classes;
  std::uint32_t num_samples;
};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

std::string begin(std::string_view magic, const Header& h) {
  std::string out(magic.data(), kMagicSize);
  put_u32(out, h.width);
  put_u32(out, h.height);
  put_u32(out, h.num_classes);
  put_u32(out, h.num_samples);
  return out;
}

Header read_header(std::string_view bytes, std::string_view magic) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagicSize) != magic.substr(0, kMagicSize)) {
    throw MalformedHeader("expected a " + std::string(magic.substr(0, 5)) + " header");
  }
  return {get_u32(bytes, 6), get_u32(bytes, 10), get_u32(bytes, 14), get_u32(bytes, 18)};
}

void check_payload(std::string_view bytes, std::uint64_t count, std::size_t elem) {
  const std::uint64_t want = count * elem;
  const std::uint64_t have = bytes.size() - kHeaderSize;
  if (have != want) {
    throw DimensionMismatch("payload holds " + std::to_string(have) + " bytes, header implies " +
                            std::to_string(want));
  }
}

int to_dim(std::uint32_t v, const char* what) {
  if (v == 0 || v > (1u << 24)) {
    throw MalformedHeader(std::string("implausible ") + what + " " + std::to_string(v));
  }
  return static_cast<int>(v);
}

constexpr std::string_view kStackMagic{"RSEG1\0", 6};
constexpr std::string_view kLabelMagic{"RLBL1\0", 6};
constexpr std::string_view kVarianceMagic{"RVAR1\0", 6};

}  // namespace

std::string encode_sample_stack(const SampleStack& stack) {
  std::string out = begin(kStackMagic, {static_cast<std::uint32_t>(stack.width()),
                                        static_cast<std::uint32_t>(stack.height()),
                                        static_cast<std::uint32_t>(stack.num_classes()),
                                        static_cast<std::uint32_t>(stack.num_samples())});
  out.reserve(out.size() + stack.payload().size() * 4);
  for (float v : stack.payload()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

SampleStack decode_sample_stack(std::string_view bytes) {
  const Header h = read_header(bytes, kStackMagic);
  const int width = to_dim(h.width, "width");
  const int height = to_dim(h.height, "height");
  if (h.num_classes < 2) throw MalformedHeader("stack needs at least two classes");
  if (h.num_samples < 1) throw MalformedHeader("stack needs at least one sample");
  const int classes = to_dim(h.num_classes, "num_classes");
  const int samples = to_dim(h.num_samples, "num_samples");
  const std::uint64_t count = std::uint64_t{h.width} * h.height * h.num_classes * h.num_samples;
  check_payload(bytes, count, 4);

  std::vector<float> probs(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    probs[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
  }

  for (std::uint64_t at = 0; at < count; at += h.num_classes) {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < h.num_classes; ++c) {
      const float v = probs[at + c];
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw ProbabilityDrift("probability outside [0,1] at value index " +
                               std::to_string(at + c));
      }
      sum += v;
    }
    const double drift = std::abs(sum - 1.0);
    if (drift > kIngestSumTolerance) {
      const std::uint64_t pixel = at / h.num_classes;
      throw ProbabilityDrift("pixel record " + std::to_string(pixel) + " sums to " +
                             std::to_string(sum));
    }
    if (drift > kRenormalizeThreshold) {
      for (std::uint32_t c = 0; c < h.num_classes; ++c) {
        probs[at + c] = static_cast<float>(probs[at + c] / sum);
      }
    }
  }
  return SampleStack(width, height, classes, samples, std::move(probs));
}

std::string encode_label_map(const LabelMap& labels) {
  std::string out = begin(kLabelMagic, {static_cast<std::uint32_t>(labels.width()),
                                        static_cast<std::uint32_t>(labels.height()),
                                        static_cast<std::uint32_t>(labels.num_classes), 1});
  for (std::uint32_t v : labels.labels.values()) put_u32(out, v);
  return out;
}

LabelMap decode_label_map(std::string_view bytes) {
  const Header h = read_header(bytes, kLabelMagic);
  const int width = to_dim(h.width, "width");
  const int height = to_dim(h.height, "height");
  const int classes = to_dim(h.num_classes, "num_classes");
  const std::uint64_t count = std::uint64_t{h.width} * h.height;
  check_payload(bytes, count, 4);
  LabelMap out{classes, Grid<std::uint32_t>(width, height)};
  auto values = out.labels.values();
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = get_u32(bytes, kHeaderSize + 4 * i);
    if (values[i] >= h.num_classes) {
      throw DimensionMismatch("label " + std::to_string(values[i]) + " exceeds num_classes");
    }
  }
  return out;
}

std::string encode_variance_map(const VarianceMap& variance) {
  std::string out = begin(kVarianceMagic, {static_cast<std::uint32_t>(variance.width()),
                                           static_cast<std::uint32_t>(variance.height()), 1, 1});
  for (double v : variance.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

VarianceMap decode_variance_map(std::string_view bytes) {
  const Header h = read_header(bytes, kVarianceMagic);
  const int width = to_dim(h.width, "width");
  const int height = to_dim(h.height, "height");
  const std::uint64_t count = std::uint64_t{h.width} * h.height;
  check_payload(bytes, count, 8);
  VarianceMap out(width, height);
  auto values = out.values();
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(get_u64(bytes, kHeaderSize + 8 * i));
    if (!(values[i] >= 0.0 && values[i] <= 0.25)) {
      throw ParseError("variance value outside [0, 0.25]");
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

SampleStack read_sample_stack(const std::filesystem::path& path) {
  return decode_sample_stack(read_file(path));
}
void write_sample_stack(const std::filesystem::path& path, const SampleStack& stack) {
  write_file(path, encode_sample_stack(stack));
}
LabelMap read_label_map(const std::filesystem::path& path) {
  return decode_label_map(read_file(path));
}
void write_label_map(const std::filesystem::path& path, const LabelMap& labels) {
  write_file(path, encode_label_map(labels));
}
VarianceMap read_variance_map(const std::filesystem::path& path) {
  return decode_variance_map(read_file(path));
}
void write_variance_map(const std::filesystem::path& path, const VarianceMap& variance) {
  write_file(path, encode_variance_map(variance));
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

double parse_real(std::string_view token) {
  token = detail::trim(token);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

std::string label_map_to_csv(const LabelMap& labels) {
  std::string out = "# num_classes=" + std::to_string(labels.num_classes) + "\n";
  for (int r = 0; r < labels.height(); ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      if (c > 0) out.push_back(',');
      out += std::to_string(labels.labels[{r, c}]);
    }
    out.push_back('\n');
  }
  return out;
}

LabelMap label_map_from_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  constexpr std::string_view kPrefix = "# num_classes=";
  if (lines.empty() || !lines.front().starts_with(kPrefix)) {
    throw ParseError("label CSV must start with '# num_classes=<C>'");
  }
  const int classes = detail::parse_int<int>(lines.front().substr(kPrefix.size()));
  std::vector<std::vector<std::uint32_t>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    auto& row = rows.emplace_back();
    for (auto tok : detail::split(lines[i], ',')) row.push_back(detail::parse_int<std::uint32_t>(tok));
  }
  if (rows.empty() || rows.front().empty()) throw ParseError("label CSV has no cells");
  const int width = static_cast<int>(rows.front().size());
  LabelMap out{classes, Grid<std::uint32_t>(width, static_cast<int>(rows.size()))};
  for (int r = 0; r < out.height(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) {
      throw DimensionMismatch("label CSV row " + std::to_string(r) + " has a different width");
    }
    for (int c = 0; c < width; ++c) {
      if (rows[r][c] >= static_cast<std::uint32_t>(classes)) {
        throw DimensionMismatch("label CSV value exceeds num_classes");
      }
      out.labels[{r, c}] = rows[r][c];
    }
  }
  return out;
}

std::string real_grid_to_csv(const Grid<double>& grid) {
  std::string out;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (c > 0) out.push_back(',');
      out += format_real(grid[{r, c}]);
    }
    out.push_back('\n');
  }
  return out;
}

Grid<double> real_grid_from_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for (auto line : detail::split_lines(text)) {
    if (detail::trim(line).empty() || line.starts_with('#')) continue;
    auto& row = rows.emplace_back();
    for (auto tok : detail::split(line, ',')) row.push_back(parse_real(tok));
  }
  if (rows.empty() || rows.front().empty()) throw ParseError("grid CSV has no cells");
  const int width = static_cast<int>(rows.front().size());
  Grid<double> out(width, static_cast<int>(rows.size()));
  for (int r = 0; r < out.height(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) {
      throw DimensionMismatch("grid CSV row " + std::to_string(r) + " has a different width");
    }
    for (int c = 0; c < width; ++c) out[{r, c}] = rows[r][c];
  }
  return out;
}

}  // namespace riskgrid
