#pragma once

// Minimal RIFF/WAVE reader and writer. Supports 16-bit PCM and 32-bit float,
// mono or stereo (stereo is down-mixed by averaging). Other formats and
// sample rates are rejected; there is no resampler.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "clipsep/common.hpp"
#include "clipsep/dsp.hpp"

namespace clipsep {

namespace detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}
inline std::uint16_t rd_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | p[1] << 8);
}
inline void wr_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void wr_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char(v >> 8));
}

}  // namespace detail

template <class R>
AudioClip<R> read_wav(const std::string& path, int expected_rate = 16000) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open wav file: " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path, 0);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    const std::uint32_t len = detail::rd_u32(raw.data() + pos + 4);
    if (pos + 8 + len > raw.size())
      throw FormatError("truncated chunk in " + path, pos);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("short fmt chunk in " + path, pos);
      const unsigned char* f = raw.data() + pos + 8;
      format = detail::rd_u16(f);
      channels = detail::rd_u16(f + 2);
      rate = detail::rd_u32(f + 4);
      bits = detail::rd_u16(f + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);  // chunks are word-aligned
  }
  if (data_off == 0) throw FormatError("no data chunk in " + path, raw.size());
  if (channels < 1 || channels > 2)
    throw DataError("unsupported channel count " + std::to_string(channels) + " in " + path);
  if (int(rate) != expected_rate)
    throw DataError("sample rate " + std::to_string(rate) + " Hz in " + path + ", expected " +
                    std::to_string(expected_rate) + " Hz (no resampler)");

  const bool pcm16 = (format == 1 && bits == 16);
  const bool f32 = (format == 3 && bits == 32);
  if (!pcm16 && !f32)
    throw DataError("unsupported wav encoding (format " + std::to_string(format) + ", " +
                    std::to_string(bits) + " bit) in " + path);

  const std::size_t bytes_per = (pcm16 ? 2u : 4u) * channels;
  const std::size_t n = data_len / bytes_per;
  AudioClip<R> clip;
  clip.sample_rate = int(rate);
  clip.samples.resize(n);
  const unsigned char* d = raw.data() + data_off;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (int c = 0; c < channels; ++c) {
      if (pcm16) {
        std::int16_t s;
        std::memcpy(&s, d + i * bytes_per + 2 * std::size_t(c), 2);
        acc += double(s) / 32768.0;
      } else {
        float s;
        std::memcpy(&s, d + i * bytes_per + 4 * std::size_t(c), 4);
        acc += double(s);
      }
    }
    clip.samples[i] = R(acc / channels);
  }
  return clip;
}

enum class WavEncoding { pcm16, float32 };

// Mixtures may exceed [-1, 1]; float32 stores them without clipping.
template <class R>
void write_wav(const std::string& path, const AudioClip<R>& clip,
               WavEncoding enc = WavEncoding::float32) {
  const std::uint32_t n = std::uint32_t(clip.samples.size());
  const std::uint16_t bytes = enc == WavEncoding::pcm16 ? 2 : 4;
  std::string out;
  out.reserve(44 + std::size_t(n) * bytes);
  out += "RIFF";
  detail::wr_u32(out, 36 + n * bytes);
  out += "WAVEfmt ";
  detail::wr_u32(out, 16);
  detail::wr_u16(out, enc == WavEncoding::pcm16 ? 1 : 3);
  detail::wr_u16(out, 1);  // mono
  detail::wr_u32(out, std::uint32_t(clip.sample_rate));
  detail::wr_u32(out, std::uint32_t(clip.sample_rate) * bytes);
  detail::wr_u16(out, bytes);
  detail::wr_u16(out, std::uint16_t(bytes * 8));
  out += "data";
  detail::wr_u32(out, n * bytes);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (enc == WavEncoding::pcm16) {
      double x = std::clamp(double(clip.samples[i]), -1.0, 1.0);
      auto s = std::int16_t(std::lrint(x * 32767.0));
      detail::wr_u16(out, std::uint16_t(s));
    } else {
      float f = float(clip.samples[i]);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      detail::wr_u32(out, bits);
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write wav file: " + path);
  os.write(out.data(), std::streamsize(out.size()));
}

}  // namespace clipsep
