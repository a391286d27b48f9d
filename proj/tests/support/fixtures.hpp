#pragma once

// Shared test fixtures: tiny WAV byte builders and signal generators.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cdqkl/audiofeat.hpp"

namespace fixtures {

inline void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

inline void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline void push_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

// Minimal mono PCM-16 file from raw int16 samples.
inline std::vector<std::uint8_t> wav_bytes_mono(const std::vector<std::int16_t>& samples,
                                                std::uint32_t rate) {
  std::vector<std::uint8_t> b;
  const auto data_size = static_cast<std::uint32_t>(2 * samples.size());
  push_tag(b, "RIFF");
  push_u32(b, 36 + data_size);
  push_tag(b, "WAVE");
  push_tag(b, "fmt ");
  push_u32(b, 16);
  push_u16(b, 1);
  push_u16(b, 1);
  push_u32(b, rate);
  push_u32(b, rate * 2);
  push_u16(b, 2);
  push_u16(b, 16);
  push_tag(b, "data");
  push_u32(b, data_size);
  for (std::int16_t s : samples) push_u16(b, static_cast<std::uint16_t>(s));
  return b;
}

inline std::vector<std::uint8_t> wav_bytes_stereo(const std::vector<std::int16_t>& left,
                                                  const std::vector<std::int16_t>& right,
                                                  std::uint32_t rate) {
  std::vector<std::uint8_t> b;
  const auto data_size = static_cast<std::uint32_t>(4 * left.size());
  push_tag(b, "RIFF");
  push_u32(b, 36 + data_size);
  push_tag(b, "WAVE");
  push_tag(b, "fmt ");
  push_u32(b, 16);
  push_u16(b, 1);
  push_u16(b, 2);
  push_u32(b, rate);
  push_u32(b, rate * 4);
  push_u16(b, 4);
  push_u16(b, 16);
  push_tag(b, "data");
  push_u32(b, data_size);
  for (std::size_t i = 0; i < left.size(); ++i) {
    push_u16(b, static_cast<std::uint16_t>(left[i]));
    push_u16(b, static_cast<std::uint16_t>(right[i]));
  }
  return b;
}

inline cdqkl::audiofeat::AudioBuffer sine(double freq_hz, double seconds, double rate,
                                          double amplitude = 0.5) {
  cdqkl::audiofeat::AudioBuffer a;
  a.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  a.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * i / rate);
  }
  return a;
}

inline cdqkl::audiofeat::AudioBuffer constant(double value, std::size_t n, double rate) {
  return {std::vector<double>(n, value), rate};
}

}  // namespace fixtures
