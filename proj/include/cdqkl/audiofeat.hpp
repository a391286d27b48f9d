#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdqkl/matrix.hpp"

namespace cdqkl::audiofeat {

struct AudioBuffer {
  std::vector<double> samples;  // normalized PCM in [-1, 1]
  double sample_rate = 0.0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// RIFF/WAVE PCM-16 reader: mono or stereo (downmixed by channel mean),
// little-endian. Anything else is rejected with an error naming the
// offending chunk.
AudioBuffer parse_wav(std::span<const std::uint8_t> bytes);
AudioBuffer load_wav(const std::string& path);

// PCM-16 mono writer; samples clamped to [-1, 1] and scaled by 32768.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& a);
void write_wav(const AudioBuffer& a, const std::string& path);

// Slice [offset, offset + duration) seconds, zero-padded at the end; the
// output always has round(duration * sr) samples. An offset past the end
// yields an all-zero buffer and a warning.
AudioBuffer trim(const AudioBuffer& a, double offset_s = 0.6, double duration_s = 2.5);

// Per-frame zero-crossing rate, sign(0) treated as +. Frames of `frame`
// samples every `hop`; input shorter than one frame yields a single
// zero-padded frame.
std::vector<double> zcr_frames(const AudioBuffer& a, int frame = 2048, int hop = 512);

// Per-frame root-mean-square energy, same framing.
std::vector<double> rms_frames(const AudioBuffer& a, int frame = 2048, int hop = 512);

struct MfccOptions {
  int n_mfcc = 13;
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 26;
};

// Hann window -> |FFT|^2 -> HTK mel filterbank spanning [0, sr/2] -> ln with
// floor 1e-10 -> orthonormal DCT-II, coefficients 0..n_mfcc-1 per frame.
std::vector<std::vector<double>> mfcc_frames(const AudioBuffer& a, const MfccOptions& opts = {});

AudioBuffer augment_noise(const AudioBuffer& a, double factor, std::mt19937_64& gen);
AudioBuffer augment_stretch(const AudioBuffer& a, double rate = 0.8);
AudioBuffer augment_shift(const AudioBuffer& a, double max_shift_s, std::mt19937_64& gen);
AudioBuffer augment_pitch(const AudioBuffer& a, double semitones = 0.7);

// [mean ZCR, mean RMS, mean MFCC_0..12] -> 15 values.
std::vector<double> feature_vector(const AudioBuffer& a);

// DSP internals, exposed for verification.
void fft_inplace(std::vector<std::complex<double>>& a);  // radix-2, forward
Matrix dct2_matrix(int n_out, int n_in);                 // orthonormal rows

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  int n_mels = 0;
  int n_fft = 0;
  double sample_rate = 0.0;
  std::vector<double> center_hz;  // peak frequency per filter
  Matrix weights;                 // n_mels x (n_fft/2 + 1)

  std::vector<double> apply(std::span<const double> power) const;
};

MelFilterbank make_mel_filterbank(int n_mels, int n_fft, double sample_rate);

}  // namespace cdqkl::audiofeat
