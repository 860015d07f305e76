#include "gompsnr/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gompsnr/error.hpp"

namespace gompsnr {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

struct FmtChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint16_t block_align = 0;
};

// Decodes one frame's sample for `channel`. Integer PCM maps to [-1, 1) by
// division by 2^(bits-1) when normalizing; no dithering on read.
double decode_sample(const std::uint8_t* p, std::uint16_t format,
                     std::uint16_t bits, bool normalize) {
  switch (bits) {
    case 16: {
      std::int16_t v = static_cast<std::int16_t>(read_u16(p));
      return normalize ? v / 32768.0 : static_cast<double>(v);
    }
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(p[0]) << 8) |
          (static_cast<std::uint32_t>(p[1]) << 16) |
          (static_cast<std::uint32_t>(p[2]) << 24));
      v >>= 8;  // sign-extend 24 -> 32
      return normalize ? v / 8388608.0 : static_cast<double>(v);
    }
    case 32: {
      std::uint32_t raw = read_u32(p);
      if (format == kFormatFloat) {
        float f;
        std::memcpy(&f, &raw, sizeof f);
        return static_cast<double>(f);
      }
      std::int32_t v = static_cast<std::int32_t>(raw);
      return normalize ? v / 2147483648.0 : static_cast<double>(v);
    }
    default:
      raise(Errc::unsupported_format,
            "unsupported bit depth " + std::to_string(bits));
  }
}

}  // namespace

Waveform load_waveform(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) raise(Errc::io_failure, "read failed for " + path);

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    raise(Errc::corrupt_header, path + ": not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + off;
    std::uint32_t chunk_size = read_u32(hdr + 4);
    const std::uint8_t* body = hdr + 8;
    if (off + 8 + chunk_size > bytes.size()) {
      raise(Errc::corrupt_header, path + ": chunk overruns file");
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) raise(Errc::corrupt_header, path + ": fmt chunk too small");
      fmt.format_tag = read_u16(body);
      fmt.channels = read_u16(body + 2);
      fmt.sample_rate = read_u32(body + 4);
      fmt.block_align = read_u16(body + 12);
      fmt.bits_per_sample = read_u16(body + 14);
      if (fmt.format_tag == kFormatExtensible) {
        if (chunk_size < 40) {
          raise(Errc::corrupt_header, path + ": extensible fmt chunk too small");
        }
        fmt.format_tag = read_u16(body + 24);  // first two GUID bytes
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_size = chunk_size;
    }
    off += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    raise(Errc::corrupt_header, path + ": missing fmt or data chunk");
  }
  if (fmt.format_tag != kFormatPcm && fmt.format_tag != kFormatFloat) {
    raise(Errc::unsupported_format,
          path + ": compression code " + std::to_string(fmt.format_tag) +
              " (only PCM and IEEE float are supported)");
  }
  if (fmt.format_tag == kFormatPcm &&
      (fmt.bits_per_sample != 16 && fmt.bits_per_sample != 24 &&
       fmt.bits_per_sample != 32)) {
    raise(Errc::unsupported_format,
          path + ": PCM-" + std::to_string(fmt.bits_per_sample));
  }
  if (fmt.format_tag == kFormatFloat && fmt.bits_per_sample != 32) {
    raise(Errc::unsupported_format,
          path + ": float-" + std::to_string(fmt.bits_per_sample));
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    raise(Errc::corrupt_header, path + ": zero channels or sample rate");
  }

  std::size_t bytes_per_sample = fmt.bits_per_sample / 8u;
  std::size_t frame_size = bytes_per_sample * fmt.channels;
  if (fmt.block_align != 0 && fmt.block_align != frame_size) {
    raise(Errc::corrupt_header, path + ": block align does not match format");
  }
  std::size_t frames = data_size / frame_size;
  if (frames == 0) raise(Errc::empty_audio, path + ": no samples");

  if (fmt.channels > 1 && options.channel_policy == ChannelPolicy::error) {
    raise(Errc::multi_channel,
          path + ": " + std::to_string(fmt.channels) + " channels");
  }

  Waveform w;
  w.sample_rate = fmt.sample_rate;
  w.source_path = path;
  w.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::uint8_t* p = data + f * frame_size;
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      acc += decode_sample(p + c * bytes_per_sample, fmt.format_tag,
                           fmt.bits_per_sample, options.normalize);
    }
    double v = fmt.channels > 1 ? acc / fmt.channels : acc;
    if (!std::isfinite(v)) {
      raise(Errc::invalid_input,
            path + ": non-finite sample at frame " + std::to_string(f));
    }
    w.samples[f] = v;
  }
  return w;
}

std::pair<Waveform, Waveform> align_pair(Waveform ref, Waveform est,
                                         AlignPolicy policy,
                                         std::size_t window_size) {
  if (ref.sample_rate != est.sample_rate) {
    raise(Errc::sample_rate_mismatch,
          std::to_string(ref.sample_rate) + " Hz vs " +
              std::to_string(est.sample_rate) + " Hz");
  }
  if (policy == AlignPolicy::strict) {
    if (ref.samples.size() != est.samples.size()) {
      raise(Errc::length_mismatch,
            std::to_string(ref.samples.size()) + " vs " +
                std::to_string(est.samples.size()) + " samples under strict alignment");
    }
    return {std::move(ref), std::move(est)};
  }
  std::size_t n = std::min(ref.samples.size(), est.samples.size());
  if (n < window_size) {
    raise(Errc::too_short, "only " + std::to_string(n) +
                               " samples after truncation, need " +
                               std::to_string(window_size));
  }
  ref.samples.resize(n);
  est.samples.resize(n);
  return {std::move(ref), std::move(est)};
}

}  // namespace gompsnr
