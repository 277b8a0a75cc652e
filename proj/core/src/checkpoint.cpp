#include "spadnet/checkpoint.hpp"

#include <cstring>

#include "byte_io.hpp"

namespace spadnet {
namespace {
constexpr char kMagic[8] = {'S', 'P', 'D', 'N', 'C', 'K', 'P', 'T'};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  ckpt.config.validate();
  ckpt.weights.check_against(ckpt.config);
  detail::ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(checkpoint_version);
  const auto& c = ckpt.config;
  w.u32(static_cast<std::uint32_t>(c.num_blocks));
  w.u32(static_cast<std::uint32_t>(c.channels));
  w.u32(static_cast<std::uint32_t>(c.kernel_t));
  w.u32(static_cast<std::uint32_t>(c.kernel_h));
  w.u32(static_cast<std::uint32_t>(c.kernel_w));
  w.u32(static_cast<std::uint32_t>(c.intermediate_convs));
  w.u32(static_cast<std::uint32_t>(c.skip_mode));
  w.u32(static_cast<std::uint32_t>(c.border));
  w.f64(c.leaky_slope);
  w.u32(static_cast<std::uint32_t>(ckpt.trained_bits));
  w.u64(ckpt.step);
  w.u64(ckpt.weights.parameter_count());
  for (auto block : ckpt.weights.parameters()) {
    for (double v : block) w.f32(static_cast<float>(v));
  }
  detail::write_file(path, w.buffer());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto data = detail::read_file(path);
  detail::ByteReader r(data, "checkpoint " + path.string());
  if (std::memcmp(r.take(sizeof kMagic), kMagic, sizeof kMagic) != 0) {
    throw BadMagicError(path.string() + " is not a spadnet checkpoint");
  }
  if (const auto version = r.u32(); version != checkpoint_version) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  auto& c = ckpt.config;
  c.num_blocks = static_cast<int>(r.u32());
  c.channels = static_cast<int>(r.u32());
  c.kernel_t = static_cast<int>(r.u32());
  c.kernel_h = static_cast<int>(r.u32());
  c.kernel_w = static_cast<int>(r.u32());
  c.intermediate_convs = static_cast<int>(r.u32());
  const auto skip = r.u32();
  if (skip > static_cast<std::uint32_t>(SkipMode::raw_input)) {
    throw FormatError("checkpoint has unknown skip mode " + std::to_string(skip));
  }
  c.skip_mode = static_cast<SkipMode>(skip);
  const auto border = r.u32();
  if (border > static_cast<std::uint32_t>(BorderMode::replicate)) {
    throw FormatError("checkpoint has unknown border mode " + std::to_string(border));
  }
  c.border = static_cast<BorderMode>(border);
  c.leaky_slope = r.f64();
  ckpt.trained_bits = static_cast<int>(r.u32());
  ckpt.step = r.u64();
  const auto count = r.u64();
  try {
    ckpt.weights = zero_weights(c);
  } catch (const DomainError& e) {
    throw FormatError(std::string("checkpoint config invalid: ") + e.what());
  }
  if (count != ckpt.weights.parameter_count()) {
    throw FormatError("checkpoint value count " + std::to_string(count) +
                      " does not match its config");
  }
  r.need(count * 4);
  for (auto block : ckpt.weights.parameters()) {
    for (double& v : block) v = r.f32();
  }
  if (r.remaining() != 0) throw FormatError("checkpoint has trailing bytes");
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const NetworkConfig& expected) {
  Checkpoint ckpt = load_checkpoint(path);
  if (!(ckpt.config == expected)) {
    auto kernel = [](const NetworkConfig& c) {
      return std::to_string(c.kernel_t) + "x" + std::to_string(c.kernel_h) + "x" +
             std::to_string(c.kernel_w);
    };
    throw ConfigMismatchError(
        "checkpoint architecture (K=" + std::to_string(ckpt.config.num_blocks) +
        ", channels=" + std::to_string(ckpt.config.channels) + ", kernel " +
        kernel(ckpt.config) + ") differs from expected (K=" +
        std::to_string(expected.num_blocks) + ", channels=" +
        std::to_string(expected.channels) + ", kernel " + kernel(expected) + ")");
  }
  return ckpt;
}

}  // namespace spadnet
