#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigobf/rng.hpp"
#include "sigobf/signal_core.hpp"
#include "sigobf/types.hpp"

namespace sigobf::modem {

using Bits = std::vector<std::uint8_t>;
using Labels = std::vector<unsigned>;

inline constexpr Scheme all_schemes[] = {Scheme::BPSK, Scheme::QPSK,  Scheme::PSK8,  Scheme::QAM16,
                                         Scheme::QAM64, Scheme::PAM4, Scheme::GFSK,  Scheme::BFM,
                                         Scheme::DSBAM, Scheme::SSBAM};
inline constexpr Scheme digital_schemes[] = {Scheme::BPSK,  Scheme::QPSK, Scheme::PSK8, Scheme::QAM16,
                                             Scheme::QAM64, Scheme::PAM4, Scheme::GFSK};
inline constexpr Scheme linear_schemes[] = {Scheme::BPSK,  Scheme::QPSK,  Scheme::PSK8,
                                            Scheme::QAM16, Scheme::QAM64, Scheme::PAM4};

bool is_digital(Scheme s) noexcept;
bool is_analog(Scheme s) noexcept;
// Digital schemes with a fixed constellation (every digital scheme but GFSK).
bool is_linear(Scheme s) noexcept;

std::string_view name(Scheme s) noexcept;
// Accepts the names produced by name(), case-insensitively.
Scheme scheme_from_name(std::string_view text);

// Unit-average-energy alphabet. point(label) gives the point whose Gray
// label (MSB-first bit group read as an integer) is `label`.
struct Constellation {
    cvec points;                 // geometric order
    std::vector<unsigned> label_to_point;
    int bits_per_symbol = 1;

    std::size_t size() const noexcept { return points.size(); }
    cplx point(unsigned label) const { return points[label_to_point[label]]; }
    // Minimum-distance decision, returns the label.
    unsigned decide(cplx y) const noexcept;

private:
    friend const Constellation& constellation(Scheme);
    std::vector<unsigned> point_to_label_;
};

// Throws Error(unsupported_scheme) for GFSK and analog schemes.
const Constellation& constellation(Scheme s);

int bits_per_symbol(Scheme s);

Labels bits_to_labels(std::span<const std::uint8_t> bits, int bits_per_symbol);
Bits labels_to_bits(std::span<const unsigned> labels, int bits_per_symbol);

Bits random_bits(std::size_t count, Rng& rng);

cvec map_symbols(std::span<const std::uint8_t> bits, Scheme s);
cvec map_labels(std::span<const unsigned> labels, Scheme s);

// Pulse-shapes a symbol sequence: zero-stuff by sps, convolve with the
// pulse and scale by sqrt(sps). The filter tails are kept, so the output
// has (n-1)*sps + taps samples and symbol k peaks at pulse.delay + k*sps.
// With unit-energy symbols and taps the steady-state mean power is 1.
IqFrame shape_symbols(std::span<const cplx> symbols, const dsp::PulseShape& pulse, double sample_rate);

struct GfskParams {
    double bt = 0.35;
    double modulation_index = 0.5;
    int span_symbols = 4;
};

IqFrame modulate_gfsk(std::span<const std::uint8_t> bits, int samples_per_symbol, double sample_rate,
                      const GfskParams& params = {});
// Phase discriminator integrated over each symbol period, sign decision.
Bits demod_gfsk(const IqFrame& frame, std::size_t num_bits, int samples_per_symbol,
                const GfskParams& params = {});

// Linear schemes go through shape_symbols(); GFSK uses its own Gaussian
// frequency pulse and ignores `pulse`.
IqFrame modulate_digital(std::span<const std::uint8_t> bits, Scheme s, int samples_per_symbol,
                         const dsp::PulseShape& pulse, double sample_rate = 40e6);

// Matched filter (scaled by 1/sqrt(sps)) sampled at the symbol instants of a
// frame laid out by shape_symbols().
cvec matched_filter_symbols(std::span<const cplx> samples, const dsp::PulseShape& pulse);

Labels demod_hard(const IqFrame& frame, Scheme s, const dsp::PulseShape& pulse, cplx channel_gain = 1.0);

enum class Sideband { upper, lower };

struct AnalogParams {
    double am_index = 0.5;
    double fm_deviation_hz = 2e6;
    Sideband sideband = Sideband::upper;
    double sample_rate = 40e6;
};

// message: real baseband samples with |m| <= 1.
IqFrame modulate_analog(std::span<const double> message, Scheme s, const AnalogParams& params = {});

// Filtered white Gaussian noise, peak-normalized to 1.
std::vector<double> band_limited_message(std::size_t length, double cutoff_hz, double sample_rate, Rng& rng);
// Sum of equal-amplitude cosines, peak-normalized to 1.
std::vector<double> multitone_message(std::size_t length, std::span<const double> tone_hz, double sample_rate);

// Analytic signal m + j*H{m} via the DFT.
cvec analytic_signal(std::span<const double> x);

} // namespace sigobf::modem
