#include "spadnet/digest.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "spadnet/errors.hpp"

namespace spadnet {

void Digest::update(std::span<const std::uint8_t> bytes) noexcept {
  for (std::uint8_t byte : bytes) {
    state_ ^= byte;
    state_ *= 0x100000001b3ULL;
  }
}

void Digest::update(const Frame& frame) noexcept {
  std::uint8_t buf[8];
  for (double v : frame.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(bits >> (8 * i));
    update(buf);
  }
}

void Digest::update(const FrameStack& frames) noexcept {
  for (const auto& f : frames) update(f);
}

std::string Digest::hex() const {
  char text[17];
  std::snprintf(text, sizeof text, "%016llx", static_cast<unsigned long long>(state_));
  return text;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto got = static_cast<std::size_t>(in.gcount());
    d.update({reinterpret_cast<const std::uint8_t*>(buf), got});
  }
  return d.value();
}

}  // namespace spadnet
