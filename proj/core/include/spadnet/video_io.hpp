#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spadnet/sensor_model.hpp"

namespace spadnet {

inline constexpr std::uint32_t packed_binary_version = 1;
inline constexpr std::size_t packed_binary_header_size = 32;

/// Packed 1-bit sequence. Header (little-endian, 32 bytes):
///   magic "SPADBIN1" | u32 version | u32 height | u32 width |
///   u32 frame_count | f64 frame_period
/// then frames row-major, 8 pixels per byte, MSB = leftmost pixel, each row
/// padded with zero bits to a byte boundary.
void write_packed_binary(const std::filesystem::path& path, const BinarySequence& seq);
BinarySequence read_packed_binary(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_packed_binary(const BinarySequence& seq);
BinarySequence decode_packed_binary(const std::vector<std::uint8_t>& bytes);

/// Binary PGM (P5) frames named frame_00000.pgm, frame_00001.pgm, ...
/// `maxval` 255 stores 8-bit samples, larger values store 16-bit big-endian
/// samples. Values are scaled by maxval and rounded.
void write_frames(const std::filesystem::path& dir, const FrameStack& frames,
                  int depth_bits);

/// Writes level indices k with maxval N_b so reading returns k / N_b exactly.
void write_quantized(const std::filesystem::path& dir, const QuantizedSequence& seq);

/// Reads every frame_*.pgm / frame_*.ppm in numeric order. Samples are divided
/// by the file's maxval (its white level). PPM colour is converted to luma
/// 0.299 R + 0.587 G + 0.114 B.
FrameStack read_frames(const std::filesystem::path& dir);

void write_pgm(const std::filesystem::path& path, const Frame& frame, int maxval);
Frame read_image(const std::filesystem::path& path);

std::filesystem::path frame_filename(std::size_t index, const char* extension = ".pgm");

}  // namespace spadnet
