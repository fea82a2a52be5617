#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asaedct/dct.hpp"

namespace asaedct {

using QuantizedBlock = std::vector<std::int32_t>;

/// q_k = Round(10^theta * y_k / phi), rounding half away from zero.
/// Throws kOverflow when a value does not fit in 32 bits.
QuantizedBlock quantize(const Vector& y, int theta, int phi);

/// y'_k = q_k * phi / 10^theta.
Vector dequantize(std::span<const std::int32_t> q, int theta, int phi);

/// Zero-run RLE token stream. A nonzero value v is written as the unsigned
/// LEB128 varint zigzag(v) + 1; a maximal run of r >= 1 zeros is written as
/// varint 0 followed by varint r.
std::vector<std::uint8_t> rle_encode(std::span<const std::int32_t> values);
void rle_encode_append(std::span<const std::int32_t> values,
                       std::vector<std::uint8_t>& out);

/// Inverse of rle_encode. Throws kMalformedStream on a truncated varint, a
/// zero-length run, a literal-zero token, or a literal outside int32.
std::vector<std::int32_t> rle_decode(std::span<const std::uint8_t> tokens);

/// Raw xz (.xz container, LZMA2) helpers used for the payload.
std::vector<std::uint8_t> xz_compress(std::span<const std::uint8_t> data,
                                      std::uint32_t preset);
std::vector<std::uint8_t> xz_decompress(std::span<const std::uint8_t> data);

inline constexpr std::uint16_t kStreamVersion = 1;
/// xz preset 9 with the "extreme" flag.
inline constexpr std::uint32_t kDefaultLzmaPreset = 0x80000009u;

struct StreamHeader {
  std::uint16_t version = kStreamVersion;
  std::uint32_t block_size = 64;
  std::uint32_t channels = 3;
  std::int32_t theta = 4;
  std::int32_t phi = 5;
  std::uint64_t block_count = 0;
  std::uint64_t sample_count = 0;
  double norm_scale = 1.0;
  double norm_offset = 0.0;
  std::uint32_t source_bit_depth = 64;
  std::uint32_t lzma_preset = kDefaultLzmaPreset;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

// Stream layout, all integers little-endian:
//   offset  size  field
//        0     5  magic "EEGZ1"
//        5     2  version (u16)
//        7     4  N (u32)
//       11     4  C (u32)
//       15     4  theta (i32)
//       19     4  phi (i32)
//       23     8  block count (u64)
//       31     8  original sample count (u64)
//       39     8  normalization scale (f64)
//       47     8  normalization offset (f64)
//       55     4  source bit depth (u32)
//       59     4  xz preset (u32)
//       63     8  payload length L (u64)
//       71     L  payload: .xz stream of the concatenated per-block RLE tokens
//     71+L     4  CRC32 of the payload (u32)
inline constexpr std::size_t kStreamHeaderSize = 71;

struct DecodedStream {
  StreamHeader header;
  std::vector<QuantizedBlock> blocks;
};

std::vector<std::uint8_t> compress_stream(
    std::span<const QuantizedBlock> blocks, const StreamHeader& header);

/// Throws kBadMagic, kUnsupportedVersion, kChecksumMismatch or
/// kMalformedStream.
DecodedStream decompress_stream(std::span<const std::uint8_t> stream);

}  // namespace asaedct
