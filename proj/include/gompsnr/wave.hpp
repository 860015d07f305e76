#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gompsnr {

struct Waveform {
  std::vector<double> samples;    // mono, nominal range [-1, 1]
  std::uint32_t sample_rate = 0;  // Hz
  std::string source_path;
};

enum class ChannelPolicy { error, downmix };

struct LoadOptions {
  ChannelPolicy channel_policy = ChannelPolicy::error;
  // Map integer PCM to [-1, 1) by dividing by 2^(bits-1). When false,
  // integer samples are returned as raw counts. Float data is never scaled.
  bool normalize = true;
};

// Decodes a RIFF/WAVE file holding PCM-16/24/32 or IEEE float-32 samples.
// Multi-channel input is rejected or averaged per the channel policy.
Waveform load_waveform(const std::string& path, const LoadOptions& options = {});

enum class AlignPolicy { strict, truncate };

// Brings a reference/estimate pair to a common length. Under `truncate` both
// are cut to the shorter length, which must still cover one STFT window of
// `window_size` samples. Sample rates must match exactly; no resampling.
std::pair<Waveform, Waveform> align_pair(Waveform ref, Waveform est,
                                         AlignPolicy policy,
                                         std::size_t window_size);

}  // namespace gompsnr
