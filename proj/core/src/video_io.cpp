#include "spadnet/video_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "byte_io.hpp"

namespace spadnet {
namespace fs = std::filesystem;

namespace {
constexpr char kPackedMagic[8] = {'S', 'P', 'A', 'D', 'B', 'I', 'N', '1'};

std::size_t row_bytes(int width) { return (static_cast<std::size_t>(width) + 7) / 8; }
}  // namespace

std::vector<std::uint8_t> encode_packed_binary(const BinarySequence& seq) {
  std::uint32_t h = 0, w = 0;
  if (!seq.frames.empty()) {
    h = static_cast<std::uint32_t>(seq.frames.front().height());
    w = static_cast<std::uint32_t>(seq.frames.front().width());
  }
  detail::ByteWriter out;
  out.bytes(kPackedMagic, sizeof kPackedMagic);
  out.u32(packed_binary_version);
  out.u32(h);
  out.u32(w);
  out.u32(static_cast<std::uint32_t>(seq.frames.size()));
  out.f64(seq.frame_period);
  const std::size_t stride = row_bytes(static_cast<int>(w));
  out.buffer().reserve(packed_binary_header_size + seq.frames.size() * h * stride);
  for (const auto& frame : seq.frames) {
    if (frame.height() != static_cast<int>(h) || frame.width() != static_cast<int>(w)) {
      throw ShapeError("packed binary: frames differ in size");
    }
    for (int y = 0; y < frame.height(); ++y) {
      for (std::size_t byte = 0; byte < stride; ++byte) {
        std::uint8_t packed = 0;
        for (int bit = 0; bit < 8; ++bit) {
          const auto x = static_cast<int>(byte * 8 + bit);
          if (x >= frame.width()) break;
          const auto v = frame(y, x);
          if (v > 1) throw DomainError("packed binary: pixel value is not 0 or 1");
          if (v) packed |= static_cast<std::uint8_t>(0x80u >> bit);
        }
        out.u8(packed);
      }
    }
  }
  return std::move(out.buffer());
}

BinarySequence decode_packed_binary(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader in(bytes, "packed binary");
  if (std::memcmp(in.take(sizeof kPackedMagic), kPackedMagic, sizeof kPackedMagic) != 0) {
    throw BadMagicError("not a packed binary sequence (bad magic)");
  }
  if (const auto v = in.u32(); v != packed_binary_version) {
    throw VersionError("unsupported packed binary version " + std::to_string(v));
  }
  const auto h = in.u32();
  const auto w = in.u32();
  const auto count = in.u32();
  BinarySequence seq;
  seq.frame_period = in.f64();
  if (count > 0 && (h == 0 || w == 0)) throw FormatError("packed binary: zero frame size");
  const std::size_t stride = row_bytes(static_cast<int>(w));
  in.need(static_cast<std::size_t>(count) * h * stride);
  seq.frames.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    BitFrame frame(static_cast<int>(h), static_cast<int>(w));
    for (std::uint32_t y = 0; y < h; ++y) {
      const std::uint8_t* row = in.take(stride);
      for (std::uint32_t x = 0; x < w; ++x) {
        frame(static_cast<int>(y), static_cast<int>(x)) = (row[x / 8] >> (7 - x % 8)) & 1u;
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  if (in.remaining() != 0) throw FormatError("packed binary: trailing bytes after last frame");
  return seq;
}

void write_packed_binary(const fs::path& path, const BinarySequence& seq) {
  detail::write_file(path, encode_packed_binary(seq));
}

BinarySequence read_packed_binary(const fs::path& path) {
  return decode_packed_binary(detail::read_file(path));
}

fs::path frame_filename(std::size_t index, const char* extension) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%05zu%s", index, extension);
  return name;
}

void write_pgm(const fs::path& path, const Frame& frame, int maxval) {
  if (maxval < 1 || maxval > 65535) throw DomainError("PGM maxval must be in 1..65535");
  detail::ByteWriter out;
  const std::string header = "P5\n" + std::to_string(frame.width()) + " " +
                             std::to_string(frame.height()) + "\n" + std::to_string(maxval) +
                             "\n";
  out.bytes(header.data(), header.size());
  for (double v : frame.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("frame value outside [0,1]");
    const auto code = static_cast<std::uint32_t>(std::lround(v * maxval));
    if (maxval > 255) out.u8(static_cast<std::uint8_t>(code >> 8));
    out.u8(static_cast<std::uint8_t>(code & 0xffu));
  }
  detail::write_file(path, out.buffer());
}

namespace {

void write_stack(const fs::path& dir, const FrameStack& frames, int maxval) {
  extent_of(frames);
  fs::create_directories(dir);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    write_pgm(dir / frame_filename(t), frames[t], maxval);
  }
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::vector<std::uint8_t>& data, std::size_t& pos,
                         const std::string& name) {
  for (;;) {
    while (pos < data.size() && std::isspace(data[pos])) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(data[pos])) ++pos;
  if (start == pos) throw TruncatedError(name + ": truncated image header");
  return {data.begin() + static_cast<std::ptrdiff_t>(start),
          data.begin() + static_cast<std::ptrdiff_t>(pos)};
}

int header_int(const std::vector<std::uint8_t>& data, std::size_t& pos, const std::string& name) {
  const std::string tok = header_token(data, pos, name);
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || v <= 0) {
    throw FormatError(name + ": bad header field '" + tok + "'");
  }
  return v;
}

}  // namespace

Frame read_image(const fs::path& path) {
  const auto data = detail::read_file(path);
  const std::string name = path.string();
  std::size_t pos = 0;
  const std::string magic = header_token(data, pos, name);
  if (magic != "P5" && magic != "P6") {
    throw BadMagicError(name + ": expected binary PGM (P5) or PPM (P6)");
  }
  const int width = header_int(data, pos, name);
  const int height = header_int(data, pos, name);
  const int maxval = header_int(data, pos, name);
  if (maxval > 65535) throw FormatError(name + ": maxval above 65535");
  ++pos;  // single whitespace after maxval
  const int channels = magic == "P6" ? 3 : 1;
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(width) * height * channels * sample_bytes;
  if (pos > data.size() || data.size() - pos < need) {
    throw TruncatedError(name + ": pixel data truncated");
  }
  auto sample = [&](std::size_t i) -> double {
    const std::uint8_t* p = data.data() + pos + i * sample_bytes;
    return sample_bytes == 2 ? static_cast<double>((p[0] << 8) | p[1]) : p[0];
  };
  Frame frame(height, width);
  auto out = frame.values();
  const double white = maxval;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (channels == 1) {
      out[i] = sample(i) / white;
    } else {
      const double luma =
          0.299 * sample(3 * i) + 0.587 * sample(3 * i + 1) + 0.114 * sample(3 * i + 2);
      out[i] = std::min(1.0, luma / white);
    }
  }
  return frame;
}

void write_frames(const fs::path& dir, const FrameStack& frames, int depth_bits) {
  if (depth_bits != 8 && depth_bits != 16) throw DomainError("frame depth must be 8 or 16 bits");
  write_stack(dir, frames, depth_bits == 8 ? 255 : 65535);
}

void write_quantized(const fs::path& dir, const QuantizedSequence& seq) {
  write_stack(dir, seq.frames, seq.bit_level.frames_per_sample());
}

FrameStack read_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::pair<long, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    const std::string ext = entry.path().extension().string();
    if ((ext != ".pgm" && ext != ".ppm") || stem.rfind("frame_", 0) != 0) continue;
    long index = 0;
    const char* first = stem.data() + 6;
    const char* last = stem.data() + stem.size();
    auto [p, ec] = std::from_chars(first, last, index);
    if (ec != std::errc{} || p != last) continue;
    files.emplace_back(index, entry.path());
  }
  if (files.empty()) throw IoError("no frame_*.pgm/ppm files in " + dir.string());
  std::sort(files.begin(), files.end());
  FrameStack frames;
  frames.reserve(files.size());
  for (const auto& [index, path] : files) {
    frames.push_back(read_image(path));
    if (!frames.back().same_shape(frames.front())) {
      throw FormatError("inconsistent frame size in " + dir.string() + ": " +
                        path.filename().string());
    }
  }
  return frames;
}

}  // namespace spadnet
