#pragma once

// Waveform <-> time-frequency conversion, mask construction and application,
// and signal reconstruction.
//
// Framing convention: centered STFT. The input is reflection-padded by
// filter_length/2 samples on each side and analyzed with a periodic Hann
// window, so a clip of L samples yields floor(L / hop) + 1 frames. The
// inverse applies the same window again and normalizes by the accumulated
// squared window sum (floored to avoid edge blowup).

#include <algorithm>
#include <complex>
#include <vector>

#include "clipsep/common.hpp"
#include "clipsep/fft.hpp"
#include "clipsep/tensor.hpp"

namespace clipsep {

struct StftConfig {
  int filter_length = 1024;
  int hop_length = 256;
  int window_size = 1024;
  int bins() const { return filter_length / 2 + 1; }
};

// Fixed-rate mono waveform.
template <class R>
struct AudioClip {
  std::vector<R> samples;
  int sample_rate = 16000;

  long length() const { return long(samples.size()); }
};

// T x F grid of complex STFT frames.
template <class R>
struct Spectrogram {
  long frames = 0;  // T
  long bins = 0;    // F
  std::vector<std::complex<R>> v;

  Spectrogram() = default;
  Spectrogram(long t, long f) : frames(t), bins(f), v(std::size_t(t * f)) {}

  std::complex<R>& at(long t, long f) { return v[std::size_t(t * bins + f)]; }
  const std::complex<R>& at(long t, long f) const { return v[std::size_t(t * bins + f)]; }
};

enum class MaskKind { binary, ratio, predicted };

// T x F mask with values in [0, 1].
template <class R>
struct Mask {
  Tensor<R> values;  // (T, F)
  MaskKind kind = MaskKind::predicted;
};

template <class R>
inline std::vector<R> hann_window(int n) {
  // Periodic Hann; sums to a constant under 4x overlap.
  std::vector<R> w(std::size_t(n));
  for (int i = 0; i < n; ++i)
    w[std::size_t(i)] = R(0.5) * (R(1) - R(std::cos(2.0 * 3.14159265358979323846 * i / n)));
  return w;
}

template <class R>
inline Tensor<R> magnitude(const Spectrogram<R>& spec) {
  Tensor<R> out({spec.frames, spec.bins});
  for (long i = 0; i < out.size(); ++i) out[i] = std::abs(spec.v[std::size_t(i)]);
  return out;
}

template <class R>
Spectrogram<R> stft(const AudioClip<R>& clip, const StftConfig& cfg = {}) {
  const long len = clip.length();
  const int win = cfg.window_size;
  const int hop = cfg.hop_length;
  if (len < win)
    throw InvalidInput("stft: clip of " + std::to_string(len) +
                       " samples is shorter than one window (" + std::to_string(win) + ")");

  const int pad = cfg.filter_length / 2;
  std::vector<R> padded(std::size_t(len + 2 * pad));
  for (long i = 0; i < pad; ++i) padded[std::size_t(i)] = clip.samples[std::size_t(pad - i)];
  std::copy(clip.samples.begin(), clip.samples.end(), padded.begin() + pad);
  for (long i = 0; i < pad; ++i)
    padded[std::size_t(len + pad + i)] = clip.samples[std::size_t(len - 2 - i)];

  const long frames = (len + 2 * pad - win) / hop + 1;
  const long bins = cfg.bins();
  Spectrogram<R> out(frames, bins);

  const auto window = hann_window<R>(win);
  RealFft<R> fft(cfg.filter_length);
  std::vector<R> buf(std::size_t(cfg.filter_length), R(0));
  for (long t = 0; t < frames; ++t) {
    const R* src = padded.data() + t * hop;
    for (int i = 0; i < win; ++i) buf[std::size_t(i)] = src[i] * window[std::size_t(i)];
    fft.forward(buf.data(), &out.at(t, 0));
  }
  return out;
}

template <class R>
AudioClip<R> istft(const Spectrogram<R>& spec, long target_len, const StftConfig& cfg = {},
                   int sample_rate = 16000) {
  if (spec.frames <= 0) throw InvalidInput("istft: degenerate spectrogram with no frames");
  if (spec.bins != cfg.bins())
    throw InvalidInput("istft: expected " + std::to_string(cfg.bins()) + " bins, got " +
                       std::to_string(spec.bins));

  const int win = cfg.window_size;
  const int hop = cfg.hop_length;
  const int pad = cfg.filter_length / 2;
  const long padded_len = (spec.frames - 1) * hop + win;

  std::vector<R> acc(std::size_t(padded_len), R(0));
  std::vector<R> wsum(std::size_t(padded_len), R(0));
  const auto window = hann_window<R>(win);

  RealFft<R> fft(cfg.filter_length);
  std::vector<R> frame(std::size_t(cfg.filter_length));
  for (long t = 0; t < spec.frames; ++t) {
    fft.inverse(&spec.at(t, 0), frame.data());
    R* dst = acc.data() + t * hop;
    R* wdst = wsum.data() + t * hop;
    for (int i = 0; i < win; ++i) {
      dst[i] += frame[std::size_t(i)] * window[std::size_t(i)];
      wdst[i] += window[std::size_t(i)] * window[std::size_t(i)];
    }
  }

  constexpr R kWsumFloor = R(1e-8);
  AudioClip<R> out;
  out.sample_rate = sample_rate;
  out.samples.assign(std::size_t(target_len), R(0));
  const long n = std::min(target_len, padded_len - pad);
  for (long i = 0; i < n; ++i) {
    const std::size_t j = std::size_t(i + pad);
    out.samples[std::size_t(i)] = acc[j] / std::max(wsum[j], kWsumFloor);
  }
  return out;
}

// Masked spectrogram: magnitude scaled by the mask, phase preserved.
template <class R>
Spectrogram<R> apply_mask(const Spectrogram<R>& spec, const Mask<R>& mask) {
  if (mask.values.ndim() != 2 || mask.values.dim(0) != spec.frames ||
      mask.values.dim(1) != spec.bins)
    throw InvalidInput("apply_mask: mask shape " + shape_str(mask.values.shape) +
                       " does not match spectrogram " + std::to_string(spec.frames) + "x" +
                       std::to_string(spec.bins));
  Spectrogram<R> out(spec.frames, spec.bins);
  for (std::size_t i = 0; i < spec.v.size(); ++i) out.v[i] = spec.v[i] * mask.values[long(i)];
  return out;
}

// Ideal binary masks: source i wins bin (t,f) iff its magnitude is strictly
// largest; ties go to the lowest index. The n masks partition the grid.
template <class R>
std::vector<Mask<R>> binary_masks(const std::vector<Tensor<R>>& sources) {
  if (sources.empty()) throw InvalidInput("binary_masks: no sources");
  const Shape shape = sources[0].shape;
  for (const auto& s : sources)
    if (s.shape != shape) throw InvalidInput("binary_masks: source shapes differ");

  std::vector<Mask<R>> masks(sources.size());
  for (auto& m : masks) {
    m.values = Tensor<R>(shape);
    m.kind = MaskKind::binary;
  }
  const long n = shape_numel(shape);
  for (long i = 0; i < n; ++i) {
    std::size_t best = 0;
    R best_val = sources[0][i];
    for (std::size_t s = 1; s < sources.size(); ++s) {
      if (sources[s][i] > best_val) {
        best_val = sources[s][i];
        best = s;
      }
    }
    masks[best].values[i] = R(1);
  }
  return masks;
}

// Ratio masks: |S_i| / (sum_j |S_j| + eps), clipped to [0, 1]. The sum of
// source magnitudes is used as the denominator so the result is in [0, 1]
// by construction even when mixture phase cancellation occurs.
template <class R>
std::vector<Mask<R>> ratio_masks(const std::vector<Tensor<R>>& sources, R eps = R(1e-8)) {
  if (sources.empty()) throw InvalidInput("ratio_masks: no sources");
  const Shape shape = sources[0].shape;
  for (const auto& s : sources)
    if (s.shape != shape) throw InvalidInput("ratio_masks: source shapes differ");

  std::vector<Mask<R>> masks(sources.size());
  for (auto& m : masks) {
    m.values = Tensor<R>(shape);
    m.kind = MaskKind::ratio;
  }
  const long n = shape_numel(shape);
  for (long i = 0; i < n; ++i) {
    R denom = eps;
    for (const auto& s : sources) denom += s[i];
    for (std::size_t s = 0; s < sources.size(); ++s)
      masks[s].values[i] = std::clamp(sources[s][i] / denom, R(0), R(1));
  }
  return masks;
}

template <class R>
std::vector<Mask<R>> ground_truth_masks(const std::vector<Tensor<R>>& sources,
                                        MaskKind kind = MaskKind::binary) {
  return kind == MaskKind::binary ? binary_masks(sources) : ratio_masks(sources);
}

}  // namespace clipsep
