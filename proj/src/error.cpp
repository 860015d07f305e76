#include "gompsnr/error.hpp"

namespace gompsnr {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unsupported_format: return "unsupported_format";
    case Errc::corrupt_header: return "corrupt_header";
    case Errc::empty_audio: return "empty_audio";
    case Errc::multi_channel: return "multi_channel";
    case Errc::sample_rate_mismatch: return "sample_rate_mismatch";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::too_short: return "too_short";
    case Errc::missing_column: return "missing_column";
    case Errc::duplicate_id: return "duplicate_id";
    case Errc::empty_manifest: return "empty_manifest";
    case Errc::io_failure: return "io_failure";
    case Errc::invalid_config: return "invalid_config";
    case Errc::invalid_input: return "invalid_input";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::silent_reference: return "silent_reference";
    case Errc::constant_input: return "constant_input";
    case Errc::too_few: return "too_few";
    case Errc::unknown_metric: return "unknown_metric";
  }
  return "unknown";
}

}  // namespace gompsnr
