#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigobf/types.hpp"

namespace sigobf::dsp {

enum class PulseKind { raised_cosine, root_raised_cosine, rectangular };

struct PulseShape {
    PulseKind kind = PulseKind::raised_cosine;
    double rolloff = 0.5;
    int span_symbols = 10;
    int samples_per_symbol = 8;
    std::vector<double> taps;
    // Samples between the first tap and the pulse peak.
    std::size_t delay = 0;

    // Single-tap pass-through pulse (one sample per symbol).
    static PulseShape identity();
    // Hold pulse of length sps with unit energy (zero delay).
    static PulseShape rectangular(int samples_per_symbol);
};

// RC or RRC design with span*sps+1 symmetric, unit-energy taps.
// Root-raised-cosine taps are refined so that the matched pair is
// Nyquist at symbol spacing to machine precision despite truncation.
PulseShape design_pulse(PulseKind kind, double rolloff, int span_symbols, int samples_per_symbol);

double mean_power(std::span<const cplx> x);

// Scales the frame to unit mean power over all samples.
IqFrame normalize_power(IqFrame frame);

// Full linear convolution, length x.size() + h.size() - 1.
cvec convolve(std::span<const cplx> x, std::span<const double> h);
cvec convolve(std::span<const cplx> x, std::span<const cplx> h);

// Zero-stuffs by upsample_factor, filters with the pulse, and drops the
// first pulse.delay output samples (the filter transient), keeping
// input.size() * upsample_factor samples.
IqFrame filter_and_resample(const IqFrame& frame, const PulseShape& pulse, int upsample_factor);

enum class WindowKind { rectangular, hann };

struct SpectrogramParams {
    std::size_t window_len = 128;
    std::size_t hop = 32;
    std::size_t fft_len = 256;
    WindowKind window = WindowKind::hann;
};

// Magnitude STFT. Columns are fft-shifted: column c holds the bin at
// frequency (c - fft_len/2) * sample_rate / fft_len.
struct Spectrogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double sample_rate = 1.0;
    SpectrogramParams params;
    std::vector<double> magnitude; // row-major

    double at(std::size_t r, std::size_t c) const { return magnitude[r * cols + c]; }
    double bin_frequency(std::size_t c) const;
    // Time of the centre of row r, seconds from the first sample.
    double row_time(std::size_t r) const;
    std::size_t peak_column(std::size_t r) const;
};

Spectrogram spectrogram(const IqFrame& frame, const SpectrogramParams& params = {});

} // namespace sigobf::dsp
