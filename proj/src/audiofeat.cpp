#include "cdqkl/audiofeat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cdqkl::audiofeat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogFloor = 1e-10;

[[noreturn]] void parse_fail(const std::string& what) {
  throw std::runtime_error("wav parse error: " + what);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
         (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

std::string read_tag(std::span<const std::uint8_t> b, std::size_t pos) {
  return std::string(reinterpret_cast<const char*>(b.data() + pos), 4);
}

std::size_t frame_count(std::size_t len, int frame, int hop) {
  if (len < static_cast<std::size_t>(frame)) return 1;
  return (len - frame) / hop + 1;
}

// Frame f of the signal, zero-padded past the end.
std::vector<double> gather_frame(const std::vector<double>& s, std::size_t f, int frame, int hop) {
  std::vector<double> out(frame, 0.0);
  const std::size_t start = f * static_cast<std::size_t>(hop);
  for (int t = 0; t < frame; ++t) {
    const std::size_t i = start + t;
    if (i < s.size()) out[t] = s[i];
  }
  return out;
}

// Linear-interpolation resampler: out[i] = s(i * rate).
std::vector<double> resample_linear(const std::vector<double>& s, double rate,
                                    std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  if (s.empty()) return out;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * rate;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 < s.size()) {
      const double frac = pos - static_cast<double>(i0);
      out[i] = s[i0] * (1.0 - frac) + s[i0 + 1] * frac;
    } else if (i0 < s.size()) {
      out[i] = s[i0];
    }
  }
  return out;
}

// Pitch-preserving time stretch to an exact output length (WSOLA: windowed
// overlap-add with a small search aligning each grain to the natural
// continuation of the previous one). Inputs shorter than one grain fall back
// to plain resampling.
std::vector<double> wsola_stretch(const std::vector<double>& in, std::size_t out_len) {
  const std::size_t n = in.size();
  constexpr std::size_t kFrame = 512;
  constexpr std::size_t kHop = kFrame / 4;
  if (out_len == 0) return {};
  if (n <= kFrame || out_len <= kFrame) {
    return resample_linear(in, static_cast<double>(n) / static_cast<double>(out_len), out_len);
  }

  std::vector<double> window(kFrame);
  for (std::size_t t = 0; t < kFrame; ++t) {
    window[t] = 0.5 - 0.5 * std::cos(2.0 * kPi * t / kFrame);
  }

  std::vector<double> out(out_len, 0.0);
  std::vector<double> acc(out_len, 0.0);
  const double ratio =
      static_cast<double>(n - kFrame) / static_cast<double>(out_len - kFrame);
  const long max_start = static_cast<long>(n - kFrame);
  long prev_start = -1;
  for (std::size_t pos = 0; pos < out_len; pos += kHop) {
    long chosen = std::clamp(std::lround(pos * ratio), 0L, max_start);
    if (prev_start >= 0) {
      const long target = std::min(prev_start + static_cast<long>(kHop), max_start);
      const long lo = std::max(0L, chosen - static_cast<long>(kHop) / 2);
      const long hi = std::min(max_start, chosen + static_cast<long>(kHop) / 2);
      double best = -1e300;
      for (long cand = lo; cand <= hi; ++cand) {
        double score = 0.0;
        for (std::size_t t = 0; t < kFrame - kHop; ++t) score += in[cand + t] * in[target + t];
        if (score > best) {
          best = score;
          chosen = cand;
        }
      }
    }
    for (std::size_t t = 0; t < kFrame && pos + t < out_len; ++t) {
      out[pos + t] += in[chosen + t] * window[t];
      acc[pos + t] += window[t];
    }
    prev_start = chosen;
  }
  for (std::size_t i = 0; i < out_len; ++i) {
    if (acc[i] > 1e-12) out[i] /= acc[i];
  }
  return out;
}

}  // namespace

AudioBuffer parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) parse_fail("RIFF header truncated");
  const std::string riff = read_tag(bytes, 0);
  if (riff != "RIFF") {
    if (riff == "RIFX") parse_fail("RIFX (big-endian) containers are unsupported");
    parse_fail("missing RIFF tag");
  }
  if (read_tag(bytes, 8) != "WAVE") parse_fail("missing WAVE form type");

  bool have_fmt = false;
  bool have_data = false;
  int channels = 0;
  std::uint32_t rate = 0;
  std::vector<double> samples;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = read_tag(bytes, pos);
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t payload = pos + 8;
    if (payload + size > bytes.size()) parse_fail("chunk '" + id + "' truncated");

    if (id == "fmt ") {
      if (size < 16) parse_fail("fmt  chunk too short");
      const std::uint16_t codec = read_u16(bytes, payload);
      channels = read_u16(bytes, payload + 2);
      rate = read_u32(bytes, payload + 4);
      const std::uint16_t bits = read_u16(bytes, payload + 14);
      if (codec != 1) parse_fail("fmt : codec " + std::to_string(codec) + " is not PCM");
      if (bits != 16) parse_fail("fmt : only 16-bit PCM supported, got " + std::to_string(bits));
      if (channels != 1 && channels != 2) {
        parse_fail("fmt : unsupported channel count " + std::to_string(channels));
      }
      if (rate == 0) parse_fail("fmt : zero sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) parse_fail("data chunk before fmt ");
      const std::size_t bytes_per_frame = 2 * static_cast<std::size_t>(channels);
      if (size % bytes_per_frame != 0) parse_fail("data chunk size is not whole frames");
      const std::size_t n_frames = size / bytes_per_frame;
      samples.reserve(n_frames);
      for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t at = payload + f * bytes_per_frame;
        const auto left = static_cast<std::int16_t>(read_u16(bytes, at));
        if (channels == 1) {
          samples.push_back(left / 32768.0);
        } else {
          const auto right = static_cast<std::int16_t>(read_u16(bytes, at + 2));
          samples.push_back((static_cast<double>(left) + right) * 0.5 / 32768.0);
        }
      }
      have_data = true;
    }
    pos = payload + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt) parse_fail("missing fmt  chunk");
  if (!have_data) parse_fail("missing data chunk");
  return AudioBuffer{std::move(samples), static_cast<double>(rate)};
}

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& a) {
  if (a.sample_rate <= 0) throw std::invalid_argument("encode_wav: non-positive sample rate");
  const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(a.sample_rate));
  const std::uint32_t data_size = static_cast<std::uint32_t>(2 * a.samples.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto push_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };
  auto push_u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  };
  auto push_u16 = [&out](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  };
  push_tag("RIFF");
  push_u32(36 + data_size);
  push_tag("WAVE");
  push_tag("fmt ");
  push_u32(16);
  push_u16(1);  // PCM
  push_u16(1);  // mono
  push_u32(rate);
  push_u32(rate * 2);  // byte rate
  push_u16(2);         // block align
  push_u16(16);        // bits
  push_tag("data");
  push_u32(data_size);
  for (double s : a.samples) {
    const long v = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
    push_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void write_wav(const AudioBuffer& a, const std::string& path) {
  const auto bytes = encode_wav(a);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioBuffer trim(const AudioBuffer& a, double offset_s, double duration_s) {
  if (offset_s < 0 || duration_s < 0) {
    throw std::invalid_argument("trim: offset and duration must be non-negative");
  }
  const auto start = static_cast<std::size_t>(std::llround(offset_s * a.sample_rate));
  const auto want = static_cast<std::size_t>(std::llround(duration_s * a.sample_rate));
  AudioBuffer out;
  out.sample_rate = a.sample_rate;
  out.samples.assign(want, 0.0);
  if (start >= a.samples.size()) {
    std::cerr << "trim: warning: offset " << offset_s << "s is past the end of a "
              << a.duration_s() << "s buffer, returning silence\n";
    return out;
  }
  const std::size_t avail = std::min(want, a.samples.size() - start);
  std::copy_n(a.samples.begin() + static_cast<std::ptrdiff_t>(start), avail, out.samples.begin());
  return out;
}

std::vector<double> zcr_frames(const AudioBuffer& a, int frame, int hop) {
  if (frame <= 1) throw std::invalid_argument("zcr_frames: frame must be > 1");
  if (hop < 1) throw std::invalid_argument("zcr_frames: hop must be >= 1");
  const std::size_t frames = frame_count(a.samples.size(), frame, hop);
  std::vector<double> out(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto buf = gather_frame(a.samples, f, frame, hop);
    int crossings = 0;
    for (int t = 1; t < frame; ++t) {
      const bool prev_neg = buf[t - 1] < 0.0;  // sign(0) counts as +
      const bool cur_neg = buf[t] < 0.0;
      if (prev_neg != cur_neg) ++crossings;
    }
    out[f] = static_cast<double>(crossings) / static_cast<double>(frame - 1);
  }
  return out;
}

std::vector<double> rms_frames(const AudioBuffer& a, int frame, int hop) {
  if (frame <= 1) throw std::invalid_argument("rms_frames: frame must be > 1");
  if (hop < 1) throw std::invalid_argument("rms_frames: hop must be >= 1");
  const std::size_t frames = frame_count(a.samples.size(), frame, hop);
  std::vector<double> out(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto buf = gather_frame(a.samples, f, frame, hop);
    double acc = 0.0;
    for (double v : buf) acc += v * v;
    out[f] = std::sqrt(acc / static_cast<double>(frame));
  }
  return out;
}

void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft: length must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

Matrix dct2_matrix(int n_out, int n_in) {
  if (n_out < 1 || n_in < 1 || n_out > n_in) {
    throw std::invalid_argument("dct2_matrix: need 1 <= n_out <= n_in");
  }
  Matrix d(n_out, n_in);
  const double scale0 = std::sqrt(1.0 / n_in);
  const double scale = std::sqrt(2.0 / n_in);
  for (int k = 0; k < n_out; ++k) {
    for (int i = 0; i < n_in; ++i) {
      d(k, i) = (k == 0 ? scale0 : scale * std::cos(kPi * (i + 0.5) * k / n_in));
    }
  }
  return d;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank make_mel_filterbank(int n_mels, int n_fft, double sample_rate) {
  if (n_mels < 1) throw std::invalid_argument("mel filterbank: n_mels must be >= 1");
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0) {
    throw std::invalid_argument("mel filterbank: n_fft must be a power of two");
  }
  if (sample_rate <= 0) throw std::invalid_argument("mel filterbank: bad sample rate");

  const int n_bins = n_fft / 2 + 1;
  std::vector<double> hz(n_mels + 2);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  for (int i = 0; i < n_mels + 2; ++i) {
    hz[i] = mel_to_hz(mel_hi * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }

  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_fft = n_fft;
  fb.sample_rate = sample_rate;
  fb.center_hz.assign(hz.begin() + 1, hz.end() - 1);
  fb.weights = Matrix(n_mels, n_bins, 0.0);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = hz[m];
    const double mid = hz[m + 1];
    const double hi = hz[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double v = 0.0;
      if (f > lo && f < hi) {
        v = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
      fb.weights(m, k) = std::max(0.0, v);
    }
  }
  return fb;
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  if (static_cast<int>(power.size()) != n_fft / 2 + 1) {
    throw std::invalid_argument("mel filterbank: power spectrum length mismatch");
  }
  std::vector<double> energies(n_mels, 0.0);
  for (int m = 0; m < n_mels; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) acc += weights(m, k) * power[k];
    energies[m] = acc;
  }
  return energies;
}

std::vector<std::vector<double>> mfcc_frames(const AudioBuffer& a, const MfccOptions& opts) {
  if (opts.n_fft < 2 || (opts.n_fft & (opts.n_fft - 1)) != 0) {
    throw std::invalid_argument("mfcc: n_fft must be a power of two");
  }
  if (opts.n_mfcc < 1 || opts.n_mfcc > opts.n_mels) {
    throw std::invalid_argument("mfcc: need 1 <= n_mfcc <= n_mels");
  }
  if (opts.hop < 1) throw std::invalid_argument("mfcc: hop must be >= 1");

  const auto fb = make_mel_filterbank(opts.n_mels, opts.n_fft, a.sample_rate);
  const Matrix dct = dct2_matrix(opts.n_mfcc, opts.n_mels);
  std::vector<double> window(opts.n_fft);
  for (int t = 0; t < opts.n_fft; ++t) {
    window[t] = 0.5 - 0.5 * std::cos(2.0 * kPi * t / opts.n_fft);
  }

  const std::size_t frames = frame_count(a.samples.size(), opts.n_fft, opts.hop);
  std::vector<std::vector<double>> out;
  out.reserve(frames);
  std::vector<std::complex<double>> spectrum(opts.n_fft);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto buf = gather_frame(a.samples, f, opts.n_fft, opts.hop);
    for (int t = 0; t < opts.n_fft; ++t) spectrum[t] = {buf[t] * window[t], 0.0};
    fft_inplace(spectrum);
    std::vector<double> power(opts.n_fft / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spectrum[k]);
    auto energies = fb.apply(power);
    for (double& e : energies) e = std::log(std::max(e, kLogFloor));
    std::vector<double> coeffs(opts.n_mfcc, 0.0);
    for (int k = 0; k < opts.n_mfcc; ++k) {
      double acc = 0.0;
      for (int m = 0; m < opts.n_mels; ++m) acc += dct(k, m) * energies[m];
      coeffs[k] = acc;
    }
    out.push_back(std::move(coeffs));
  }
  return out;
}

AudioBuffer augment_noise(const AudioBuffer& a, double factor, std::mt19937_64& gen) {
  if (factor < 0) throw std::invalid_argument("augment_noise: negative factor");
  double peak = 0.0;
  for (double s : a.samples) peak = std::max(peak, std::abs(s));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double amplitude = factor * unit(gen) * peak;
  std::normal_distribution<double> noise(0.0, 1.0);
  AudioBuffer out = a;
  for (double& s : out.samples) {
    s = std::clamp(s + amplitude * noise(gen), -1.0, 1.0);
  }
  return out;
}

AudioBuffer augment_stretch(const AudioBuffer& a, double rate) {
  if (rate <= 0) throw std::invalid_argument("augment_stretch: rate must be positive");
  const auto out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(a.samples.size()) / rate));
  return AudioBuffer{resample_linear(a.samples, rate, out_len), a.sample_rate};
}

AudioBuffer augment_shift(const AudioBuffer& a, double max_shift_s, std::mt19937_64& gen) {
  if (max_shift_s < 0) throw std::invalid_argument("augment_shift: negative max shift");
  const auto bound = static_cast<long>(std::llround(max_shift_s * a.sample_rate));
  std::uniform_int_distribution<long> pick(-bound, bound);
  const long shift = pick(gen);
  AudioBuffer out;
  out.sample_rate = a.sample_rate;
  out.samples.assign(a.samples.size(), 0.0);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const long src = static_cast<long>(i) - shift;
    if (src >= 0 && src < static_cast<long>(a.samples.size())) {
      out.samples[i] = a.samples[static_cast<std::size_t>(src)];
    }
  }
  return out;
}

AudioBuffer augment_pitch(const AudioBuffer& a, double semitones) {
  if (std::abs(semitones) >= 12.0) {
    throw std::invalid_argument("augment_pitch: |semitones| must be < 12");
  }
  const double factor = std::pow(2.0, semitones / 12.0);
  const auto mid_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(a.samples.size()) / factor));
  // Resample (shifts pitch by `factor` and shortens), then time-stretch back
  // to the original length with the pitch-preserving WSOLA stretch. A plain
  // interpolating stretch here would undo the shift.
  const auto mid = resample_linear(a.samples, factor, mid_len);
  AudioBuffer out{wsola_stretch(mid, a.samples.size()), a.sample_rate};
  for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);
  return out;
}

std::vector<double> feature_vector(const AudioBuffer& a) {
  auto mean = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
  };
  const MfccOptions opts;
  std::vector<double> out;
  out.reserve(2 + opts.n_mfcc);
  out.push_back(mean(zcr_frames(a)));
  out.push_back(mean(rms_frames(a)));
  const auto mfcc = mfcc_frames(a, opts);
  for (int k = 0; k < opts.n_mfcc; ++k) {
    double acc = 0.0;
    for (const auto& frame : mfcc) acc += frame[k];
    out.push_back(acc / static_cast<double>(mfcc.size()));
  }
  return out;
}

}  // namespace cdqkl::audiofeat
