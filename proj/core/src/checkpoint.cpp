#include "asaedct/checkpoint.hpp"

#include <string_view>

#include "asaedct/error.hpp"
#include "bytes.hpp"

namespace asaedct {
namespace {

constexpr std::string_view kMagic = "ASAEDCT1";
constexpr std::uint32_t kFlagTanh = 1u << 0;
constexpr std::uint32_t kFlagScaling = 1u << 1;
constexpr std::uint32_t kFlagDctOnly = 1u << 2;
constexpr std::uint32_t kMaxDimension = 1u << 16;

void put_matrix(detail::ByteWriter& w, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  }
}

void put_vector(detail::ByteWriter& w, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) w.f64(v[i]);
}

void get_matrix(detail::ByteReader& r, Matrix& m) {
  for (Index row = 0; row < m.rows(); ++row) {
    for (Index col = 0; col < m.cols(); ++col) m(row, col) = r.f64();
  }
}

void get_vector(detail::ByteReader& r, Vector& v) {
  for (Index i = 0; i < v.size(); ++i) v[i] = r.f64();
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& p) {
  p.validate();
  const ModelConfig& cfg = p.config;
  detail::ByteWriter w;
  w.text(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(cfg.block_size));
  w.u32(static_cast<std::uint32_t>(cfg.channels));
  w.u32(cfg.threshold == ThresholdKind::kHard ? 0 : 1);
  w.u32(cfg.path_order == PathOrder::kThresholdFirst ? 0 : 1);
  w.u32((cfg.encoder_tanh ? kFlagTanh : 0) |
        (cfg.use_scaling ? kFlagScaling : 0) |
        (cfg.dct_only ? kFlagDctOnly : 0));
  put_matrix(w, p.enc_fc.weight);
  put_vector(w, p.enc_fc.bias);
  for (const auto& t : p.thresholds) put_vector(w, t);
  for (const auto& v : p.scalings) put_vector(w, v);
  put_vector(w, p.mixer.weights);
  put_matrix(w, p.dec_fc1.weight);
  put_vector(w, p.dec_fc1.bias);
  put_matrix(w, p.dec_fc2.weight);
  put_vector(w, p.dec_fc2.bias);

  const auto& buf = w.buffer();
  const std::uint32_t crc = detail::crc32(
      std::span(buf).subspan(kMagic.size(), buf.size() - kMagic.size()));
  w.u32(crc);
  return w.take();
}

ModelParams parse_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorKind::kMalformedStream, "checkpoint");
  const auto magic = r.bytes(kMagic.size());
  if (std::string_view(reinterpret_cast<const char*>(magic.data()),
                       magic.size()) != kMagic) {
    throw Error(ErrorKind::kBadMagic, "not an ASAEDCT checkpoint");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "unsupported checkpoint version " + std::to_string(version));
  }
  if (bytes.size() < kMagic.size() + 4) {
    throw Error(ErrorKind::kMalformedStream, "checkpoint: truncated");
  }
  const auto body = bytes.subspan(kMagic.size(),
                                  bytes.size() - kMagic.size() - 4);
  detail::ByteReader tail(bytes.subspan(bytes.size() - 4),
                          ErrorKind::kMalformedStream, "checkpoint");
  if (detail::crc32(body) != tail.u32()) {
    throw Error(ErrorKind::kChecksumMismatch, "checkpoint checksum mismatch");
  }

  ModelConfig cfg;
  const std::uint32_t n = r.u32();
  const std::uint32_t c = r.u32();
  if (n > kMaxDimension || c > kMaxDimension) {
    throw Error(ErrorKind::kMalformedStream, "checkpoint: implausible shape");
  }
  cfg.block_size = n;
  cfg.channels = c;
  cfg.threshold = r.u32() == 0 ? ThresholdKind::kHard : ThresholdKind::kSoft;
  cfg.path_order =
      r.u32() == 0 ? PathOrder::kThresholdFirst : PathOrder::kScaleFirst;
  const std::uint32_t flags = r.u32();
  cfg.encoder_tanh = (flags & kFlagTanh) != 0;
  cfg.use_scaling = (flags & kFlagScaling) != 0;
  cfg.dct_only = (flags & kFlagDctOnly) != 0;

  ModelParams p = init_params(0, cfg, 0.0);
  get_matrix(r, p.enc_fc.weight);
  get_vector(r, p.enc_fc.bias);
  for (auto& t : p.thresholds) get_vector(r, t);
  for (auto& v : p.scalings) get_vector(r, v);
  get_vector(r, p.mixer.weights);
  get_matrix(r, p.dec_fc1.weight);
  get_vector(r, p.dec_fc1.bias);
  get_matrix(r, p.dec_fc2.weight);
  get_vector(r, p.dec_fc2.bias);
  if (r.remaining() != 4) {
    throw Error(ErrorKind::kMalformedStream,
                "checkpoint: size does not match its declared shape");
  }
  return p;
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
  detail::write_file(path, serialize_checkpoint(params));
}

ModelParams load_checkpoint(const std::string& path) {
  return parse_checkpoint(detail::read_file(path));
}

}  // namespace asaedct
