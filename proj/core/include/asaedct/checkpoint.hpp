#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asaedct/model.hpp"

namespace asaedct {

// Checkpoint layout (all integers little-endian):
//   "ASAEDCT1"                      8 bytes
//   version                         u32 (= 1)
//   N, C                            u32, u32
//   threshold kind, path order      u32, u32   (0 = hard / threshold-first)
//   flags                           u32        bit0 encoder tanh,
//                                              bit1 scaling, bit2 DCT-only
//   tensors as f64, in order: enc_fc.W (row-major), enc_fc.b, thresholds
//   (C x N), scalings (C x N), mixer (C), dec_fc1.W, dec_fc1.b, dec_fc2.W,
//   dec_fc2.b
//   CRC32 of every byte between the magic and the checksum   u32
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& params);
ModelParams parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace asaedct
