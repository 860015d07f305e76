#pragma once

#include <stdexcept>
#include <string>

namespace gompsnr {

// Stable machine-readable error codes. The CLI prints these verbatim in
// error objects and maps them to exit-code classes (input / computation /
// I/O), so renaming a code is a breaking change.
enum class Errc {
  unsupported_format,
  corrupt_header,
  empty_audio,
  multi_channel,
  sample_rate_mismatch,
  length_mismatch,
  too_short,
  missing_column,
  duplicate_id,
  empty_manifest,
  io_failure,
  invalid_config,
  invalid_input,
  shape_mismatch,
  silent_reference,
  constant_input,
  too_few,
  unknown_metric,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gompsnr
