#include <random>

#include <gtest/gtest.h>

#include "asaedct/codec.hpp"
#include "asaedct/error.hpp"
#include "oracles/oracles.hpp"

using namespace asaedct;

namespace {

using Bytes = std::vector<std::uint8_t>;

// Reference token writer, one value at a time.
void ref_varint(std::uint64_t v, Bytes& out) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v % 128 + 128));
    v /= 128;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

Bytes ref_rle(const std::vector<std::int32_t>& q) {
  Bytes out;
  std::size_t i = 0;
  while (i < q.size()) {
    if (q[i] == 0) {
      std::size_t j = i;
      while (j < q.size() && q[j] == 0) ++j;
      ref_varint(0, out);
      ref_varint(j - i, out);
      i = j;
    } else {
      const std::int64_t v = q[i];
      const std::uint64_t zz = v >= 0 ? 2 * static_cast<std::uint64_t>(v)
                                      : 2 * static_cast<std::uint64_t>(-v) - 1;
      ref_varint(zz + 1, out);
      ++i;
    }
  }
  return out;
}

std::vector<std::int32_t> sparse_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 300);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> small(-300, 300);
  std::uniform_int_distribution<std::int32_t> any(std::numeric_limits<std::int32_t>::min(),
                                                  std::numeric_limits<std::int32_t>::max());
  const double density = u(rng);
  std::vector<std::int32_t> q(static_cast<std::size_t>(len(rng)));
  for (auto& v : q) {
    if (u(rng) < density) v = u(rng) < 0.05 ? any(rng) : small(rng);
  }
  return q;
}

ErrorKind kind_of(std::span<const std::uint8_t> stream) {
  try {
    decompress_stream(stream);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorKind::kIo;
}

std::vector<QuantizedBlock> random_blocks(std::mt19937_64& rng, std::size_t count,
                                          std::size_t n, double zero_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> val(-2000, 2000);
  std::vector<QuantizedBlock> blocks(count, QuantizedBlock(n));
  for (auto& b : blocks) {
    for (auto& v : b) {
      if (u(rng) >= zero_fraction) {
        do v = val(rng); while (v == 0);
      }
    }
  }
  return blocks;
}

}  // namespace

TEST(Quantize, Examples) {
  Vector y(3);
  y << 0.00123, 0.0, -0.00123;
  EXPECT_EQ(quantize(y, 4, 5), (QuantizedBlock{2, 0, -2}));
  const std::vector<std::int32_t> q = {2, 0};
  const Vector d = dequantize(q, 4, 5);
  EXPECT_DOUBLE_EQ(d[0], 0.001);
  EXPECT_EQ(d[1], 0.0);
}

TEST(Quantize, RoundsHalfAwayFromZero) {
  Vector y(4);
  y << 0.00125, -0.00125, 0.00075, -0.00025;  // 2.5, -2.5, 1.5, -0.5
  EXPECT_EQ(quantize(y, 4, 5), (QuantizedBlock{3, -3, 2, -1}));
}

TEST(Quantize, ErrorBound) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const Vector y = oracle::random_vector(rng, 64);
    const QuantizedBlock q = quantize(y, 4, 5);
    EXPECT_LE((dequantize(q, 4, 5) - y).lpNorm<Eigen::Infinity>(), 2.5e-4 + 1e-15);
  }
}

TEST(Quantize, Overflow) {
  // 1e6 maps to 2e9, still inside int32; 1e7 maps to 2e10.
  Vector ok(1);
  ok << 1e6;
  EXPECT_EQ(quantize(ok, 4, 5)[0], 2000000000);
  Vector y(1);
  y << 1e7;
  EXPECT_THROW(quantize(y, 4, 5), Error);
  try {
    quantize(y, 4, 5);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOverflow);
  }
  y << 1.0;
  EXPECT_THROW(quantize(y, 4, 0), Error);
}

TEST(Rle, Examples) {
  const std::vector<std::int32_t> q = {7, 0, 0, 0, -2};
  EXPECT_EQ(rle_encode(q), (Bytes{0x0F, 0x00, 0x03, 0x04}));
  EXPECT_EQ(rle_decode(rle_encode(q)), q);
  EXPECT_TRUE(rle_encode(std::vector<std::int32_t>{}).empty());
  EXPECT_TRUE(rle_decode(Bytes{}).empty());
  EXPECT_EQ(rle_encode(std::vector<std::int32_t>(64, 0)), (Bytes{0x00, 0x40}));
  EXPECT_EQ(rle_encode(std::vector<std::int32_t>{300}), (Bytes{0xD9, 0x04}));
}

TEST(Rle, MatchesReferenceAndRoundTrips) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20000; ++t) {
    const auto q = sparse_sequence(rng);
    const Bytes tokens = rle_encode(q);
    ASSERT_EQ(tokens, ref_rle(q));
    ASSERT_EQ(rle_decode(tokens), q);
  }
  const std::vector<std::int32_t> extremes = {std::numeric_limits<std::int32_t>::min(),
                                              std::numeric_limits<std::int32_t>::max(), -1, 1};
  EXPECT_EQ(rle_decode(rle_encode(extremes)), extremes);
}

TEST(Rle, RejectsMalformed) {
  EXPECT_THROW(rle_decode(Bytes{0x0F, 0x80}), Error);        // half a varint
  EXPECT_THROW(rle_decode(Bytes{0x00, 0x00}), Error);        // zero-length run
  EXPECT_THROW(rle_decode(Bytes{0x00}), Error);              // run without length
  EXPECT_THROW(rle_decode(Bytes{0x01}), Error);              // literal zero
  EXPECT_THROW(rle_decode(Bytes{0xFF, 0xFF, 0xFF, 0xFF, 0x7F}), Error);  // beyond int32
  try {
    rle_decode(Bytes{0x0F, 0x80});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMalformedStream);
  }
}

TEST(Xz, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t n : {0u, 1u, 100u, 5000u}) {
    Bytes data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(byte(rng) & 0x0F);
    EXPECT_EQ(xz_decompress(xz_compress(data, kDefaultLzmaPreset)), data);
  }
  const Bytes packed = xz_compress(Bytes(100, 7), kDefaultLzmaPreset);
  EXPECT_EQ(packed[0], 0xFD);  // xz container magic
  EXPECT_EQ(packed[1], '7');
  EXPECT_THROW(xz_decompress(Bytes{1, 2, 3}), Error);
}

TEST(Stream, RoundTripAndHeader) {
  std::mt19937_64 rng(4);
  StreamHeader h;
  h.block_count = 30;
  h.sample_count = 30 * 64 - 17;
  h.norm_scale = 123.5;
  h.norm_offset = -4.25;
  h.source_bit_depth = 16;
  const auto blocks = random_blocks(rng, 30, 64, 0.6);
  const auto stream = compress_stream(blocks, h);
  const DecodedStream d = decompress_stream(stream);
  EXPECT_EQ(d.header, h);
  EXPECT_EQ(d.blocks, blocks);

  const Bytes prefix(stream.begin(), stream.begin() + 15);
  const Bytes want = {'E', 'E', 'G', 'Z', '1', 1, 0, 64, 0, 0, 0, 3, 0, 0, 0};
  EXPECT_EQ(prefix, want);
}

TEST(Stream, AllZeroBlocksAreTiny) {
  StreamHeader h;
  h.block_count = 100;
  h.sample_count = 6400;
  const std::vector<QuantizedBlock> blocks(100, QuantizedBlock(64, 0));
  const auto stream = compress_stream(blocks, h);
  EXPECT_LT(stream.size() - kStreamHeaderSize - 4, 200u);
  EXPECT_EQ(decompress_stream(stream).blocks, blocks);
}

TEST(Stream, DistinctErrors) {
  std::mt19937_64 rng(5);
  StreamHeader h;
  h.block_count = 4;
  h.sample_count = 256;
  const auto good = compress_stream(random_blocks(rng, 4, 64, 0.5), h);

  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(kind_of(bad), ErrorKind::kBadMagic);
  try {
    decompress_stream(bad);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("not an EEGZ stream"), std::string::npos);
  }

  bad = good;
  bad[5] = 2;
  EXPECT_EQ(kind_of(bad), ErrorKind::kUnsupportedVersion);
  try {
    decompress_stream(bad);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported version"), std::string::npos);
  }

  bad = good;
  bad[kStreamHeaderSize + 10] ^= 0x01;
  EXPECT_EQ(kind_of(bad), ErrorKind::kChecksumMismatch);

  bad = good;
  bad.pop_back();
  EXPECT_EQ(kind_of(bad), ErrorKind::kMalformedStream);

  // A valid payload whose token count disagrees with the header.
  StreamHeader lie = h;
  lie.block_count = 3;
  auto three = compress_stream(random_blocks(rng, 3, 64, 0.5), lie);
  three[23] = 4;  // block count field
  EXPECT_EQ(kind_of(three), ErrorKind::kMalformedStream);
}

TEST(Stream, SizeShrinksWithSparsity) {
  std::mt19937_64 rng(6);
  StreamHeader h;
  h.block_count = 50;
  h.sample_count = 3200;
  double previous = std::numeric_limits<double>::infinity();
  for (double zf : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    double total = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      total += static_cast<double>(compress_stream(random_blocks(rng, 50, 64, zf), h).size());
    }
    EXPECT_LT(total, previous) << "zero fraction " << zf;
    previous = total;
  }
}
