#include "asaedct/error.hpp"

namespace asaedct {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kNonFinite: return "non-finite value";
    case ErrorKind::kOverflow: return "overflow";
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kUnsupportedVersion: return "unsupported version";
    case ErrorKind::kChecksumMismatch: return "checksum mismatch";
    case ErrorKind::kMalformedStream: return "malformed stream";
    case ErrorKind::kCompressor: return "compressor failure";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kDivergence: return "divergence";
  }
  return "unknown";
}

}  // namespace asaedct
