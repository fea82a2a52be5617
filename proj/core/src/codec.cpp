#include "asaedct/codec.hpp"

#include <lzma.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "asaedct/error.hpp"
#include "bytes.hpp"

namespace asaedct {
namespace {

constexpr std::string_view kMagic = "EEGZ1";
constexpr std::size_t kMaxVarintBytes = 10;

double power_of_ten(int theta) { return std::pow(10.0, theta); }

void require_phi(int phi) {
  if (phi == 0) throw Error(ErrorKind::kInvalidArgument, "phi must be nonzero");
}

std::uint64_t zigzag(std::int32_t v) {
  return static_cast<std::uint64_t>(
      (static_cast<std::uint32_t>(v) << 1) ^ static_cast<std::uint32_t>(v >> 31));
}

std::int32_t unzigzag(std::uint32_t u) {
  return static_cast<std::int32_t>((u >> 1) ^ (~(u & 1) + 1));
}

void put_varint(std::uint64_t v, std::vector<std::uint8_t>& out) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < kMaxVarintBytes; ++i) {
    if (pos >= in.size()) {
      throw Error(ErrorKind::kMalformedStream, "RLE: truncated varint");
    }
    const std::uint8_t byte = in[pos++];
    v |= static_cast<std::uint64_t>(byte & 0x7f) << (7 * i);
    if ((byte & 0x80) == 0) return v;
  }
  throw Error(ErrorKind::kMalformedStream, "RLE: varint longer than 64 bits");
}

std::string lzma_message(lzma_ret ret) {
  switch (ret) {
    case LZMA_MEM_ERROR: return "out of memory";
    case LZMA_OPTIONS_ERROR: return "unsupported options";
    case LZMA_FORMAT_ERROR: return "not an xz stream";
    case LZMA_DATA_ERROR: return "corrupt data";
    case LZMA_BUF_ERROR: return "truncated input";
    default: return "error code " + std::to_string(static_cast<int>(ret));
  }
}

}  // namespace

QuantizedBlock quantize(const Vector& y, int theta, int phi) {
  require_phi(phi);
  const double factor = power_of_ten(theta);
  QuantizedBlock q(static_cast<std::size_t>(y.size()));
  for (Index k = 0; k < y.size(); ++k) {
    const double scaled = factor * y[k] / static_cast<double>(phi);
    const double rounded = std::round(scaled);
    if (!std::isfinite(rounded) ||
        rounded < static_cast<double>(std::numeric_limits<std::int32_t>::min()) ||
        rounded > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
      throw Error(ErrorKind::kOverflow,
                  "quantize: value " + std::to_string(y[k]) +
                      " exceeds 32-bit range at theta=" + std::to_string(theta) +
                      ", phi=" + std::to_string(phi));
    }
    q[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(rounded);
  }
  return q;
}

Vector dequantize(std::span<const std::int32_t> q, int theta, int phi) {
  require_phi(phi);
  const double factor = power_of_ten(theta);
  Vector y(static_cast<Index>(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k) {
    y[static_cast<Index>(k)] =
        static_cast<double>(q[k]) * static_cast<double>(phi) / factor;
  }
  return y;
}

void rle_encode_append(std::span<const std::int32_t> values,
                       std::vector<std::uint8_t>& out) {
  std::size_t i = 0;
  while (i < values.size()) {
    if (values[i] != 0) {
      put_varint(zigzag(values[i]) + 1, out);
      ++i;
      continue;
    }
    std::size_t run = 0;
    while (i < values.size() && values[i] == 0) {
      ++run;
      ++i;
    }
    put_varint(0, out);
    put_varint(run, out);
  }
}

std::vector<std::uint8_t> rle_encode(std::span<const std::int32_t> values) {
  std::vector<std::uint8_t> out;
  rle_encode_append(values, out);
  return out;
}

std::vector<std::int32_t> rle_decode(std::span<const std::uint8_t> tokens) {
  std::vector<std::int32_t> out;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const std::uint64_t token = get_varint(tokens, pos);
    if (token == 0) {
      const std::uint64_t run = get_varint(tokens, pos);
      if (run == 0) {
        throw Error(ErrorKind::kMalformedStream, "RLE: zero-length run");
      }
      if (run > (std::uint64_t{1} << 32)) {
        throw Error(ErrorKind::kMalformedStream, "RLE: implausible run length");
      }
      out.insert(out.end(), run, 0);
    } else if (token == 1) {
      throw Error(ErrorKind::kMalformedStream, "RLE: literal zero token");
    } else {
      const std::uint64_t zz = token - 1;
      if (zz > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorKind::kMalformedStream, "RLE: literal exceeds int32");
      }
      out.push_back(unzigzag(static_cast<std::uint32_t>(zz)));
    }
  }
  return out;
}

std::vector<std::uint8_t> xz_compress(std::span<const std::uint8_t> data,
                                      std::uint32_t preset) {
  lzma_options_lzma options;
  if (lzma_lzma_preset(&options, preset)) {
    throw Error(ErrorKind::kCompressor,
                "xz: unsupported preset " + std::to_string(preset));
  }
  // A dictionary larger than the input cannot help and only costs memory.
  std::uint32_t dict = LZMA_DICT_SIZE_MIN;
  while (dict < data.size() && dict < options.dict_size) dict <<= 1;
  options.dict_size = std::min(dict, options.dict_size);

  lzma_filter filters[] = {
      {LZMA_FILTER_LZMA2, &options},
      {LZMA_VLI_UNKNOWN, nullptr},
  };
  std::vector<std::uint8_t> out(lzma_stream_buffer_bound(data.size()));
  std::size_t out_pos = 0;
  const lzma_ret ret = lzma_stream_buffer_encode(
      filters, LZMA_CHECK_NONE, nullptr, data.data(), data.size(), out.data(),
      &out_pos, out.size());
  if (ret != LZMA_OK) {
    throw Error(ErrorKind::kCompressor, "xz encode failed: " + lzma_message(ret));
  }
  out.resize(out_pos);
  return out;
}

std::vector<std::uint8_t> xz_decompress(std::span<const std::uint8_t> data) {
  lzma_stream strm = LZMA_STREAM_INIT;
  lzma_ret ret = lzma_stream_decoder(&strm, UINT64_MAX, 0);
  if (ret != LZMA_OK) {
    throw Error(ErrorKind::kCompressor, "xz decoder init failed: " + lzma_message(ret));
  }
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 14];
  strm.next_in = data.data();
  strm.avail_in = data.size();
  do {
    strm.next_out = chunk;
    strm.avail_out = sizeof(chunk);
    ret = lzma_code(&strm, LZMA_FINISH);
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - strm.avail_out));
  } while (ret == LZMA_OK);
  lzma_end(&strm);
  if (ret != LZMA_STREAM_END) {
    throw Error(ErrorKind::kMalformedStream,
                "xz payload decode failed: " + lzma_message(ret));
  }
  return out;
}

std::vector<std::uint8_t> compress_stream(
    std::span<const QuantizedBlock> blocks, const StreamHeader& header) {
  if (header.block_count != blocks.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "compress_stream: header block count does not match blocks");
  }
  std::vector<std::uint8_t> tokens;
  for (const auto& block : blocks) {
    if (block.size() != header.block_size) {
      throw Error(ErrorKind::kShapeMismatch,
                  "compress_stream: block of length " +
                      std::to_string(block.size()) + ", expected " +
                      std::to_string(header.block_size));
    }
    rle_encode_append(block, tokens);
  }
  const std::vector<std::uint8_t> payload =
      xz_compress(tokens, header.lzma_preset);

  detail::ByteWriter w;
  w.text(kMagic);
  w.u16(header.version);
  w.u32(header.block_size);
  w.u32(header.channels);
  w.i32(header.theta);
  w.i32(header.phi);
  w.u64(header.block_count);
  w.u64(header.sample_count);
  w.f64(header.norm_scale);
  w.f64(header.norm_offset);
  w.u32(header.source_bit_depth);
  w.u32(header.lzma_preset);
  w.u64(payload.size());
  w.bytes(payload);
  w.u32(detail::crc32(payload));
  return w.take();
}

DecodedStream decompress_stream(std::span<const std::uint8_t> stream) {
  detail::ByteReader r(stream, ErrorKind::kMalformedStream, "EEGZ stream");
  if (stream.size() < kMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(stream.data()),
                       kMagic.size()) != kMagic) {
    throw Error(ErrorKind::kBadMagic, "not an EEGZ stream");
  }
  r.bytes(kMagic.size());

  DecodedStream out;
  StreamHeader& h = out.header;
  h.version = r.u16();
  if (h.version != kStreamVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "unsupported version " + std::to_string(h.version));
  }
  h.block_size = r.u32();
  h.channels = r.u32();
  h.theta = r.i32();
  h.phi = r.i32();
  h.block_count = r.u64();
  h.sample_count = r.u64();
  h.norm_scale = r.f64();
  h.norm_offset = r.f64();
  h.source_bit_depth = r.u32();
  h.lzma_preset = r.u32();
  const std::uint64_t payload_size = r.u64();
  if (payload_size > r.remaining()) {
    throw Error(ErrorKind::kMalformedStream,
                "EEGZ stream: payload length exceeds stream size");
  }
  const auto payload = r.bytes(payload_size);
  const std::uint32_t crc = r.u32();
  if (r.remaining() != 0) {
    throw Error(ErrorKind::kMalformedStream, "EEGZ stream: trailing bytes");
  }
  if (detail::crc32(payload) != crc) {
    throw Error(ErrorKind::kChecksumMismatch, "EEGZ stream: checksum mismatch");
  }
  if (h.block_size < 1 || h.phi == 0) {
    throw Error(ErrorKind::kMalformedStream, "EEGZ stream: invalid header");
  }
  if (h.sample_count > h.block_count * h.block_size) {
    throw Error(ErrorKind::kMalformedStream,
                "EEGZ stream: sample count exceeds block capacity");
  }

  const std::vector<std::int32_t> values = rle_decode(xz_decompress(payload));
  if (values.size() != h.block_count * h.block_size) {
    throw Error(ErrorKind::kMalformedStream,
                "EEGZ stream: decoded " + std::to_string(values.size()) +
                    " values, header promises " +
                    std::to_string(h.block_count * h.block_size));
  }
  out.blocks.reserve(h.block_count);
  for (std::uint64_t b = 0; b < h.block_count; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(b * h.block_size);
    out.blocks.emplace_back(first, first + h.block_size);
  }
  return out;
}

}  // namespace asaedct
