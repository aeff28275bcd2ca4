#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "sigobf/modems.hpp"
#include "sigobf/signal_core.hpp"
#include "sigobf/types.hpp"

namespace sigobf::channel {

inline constexpr double noiseless = std::numeric_limits<double>::infinity();

enum class ChannelKind { awgn, flat, multipath };

struct ChannelSpec {
    ChannelKind kind = ChannelKind::awgn;
    double snr_db = noiseless;
    cplx gain = 1.0;          // flat only
    cvec taps;                // multipath only, symbol-spaced unless tap_spacing > 1
    std::size_t tap_spacing = 1;
    std::uint64_t seed = 0;

    static ChannelSpec awgn(double snr_db, std::uint64_t seed);
    static ChannelSpec flat(cplx gain, double snr_db, std::uint64_t seed);
    static ChannelSpec multipath(cvec taps, double snr_db, std::uint64_t seed, std::size_t tap_spacing = 1);

    void validate() const;
    // Sum of |taps|^2 (or |gain|^2, or 1 for AWGN).
    double power_gain() const;
};

// Adds CN(0, noise_var) noise to every sample; noise_var == 0 is a no-op.
IqFrame add_noise(IqFrame frame, double noise_var, std::uint64_t seed);

// Noise variance P/10^(snr/10), P measured over the payload range (whole
// frame when absent). snr_db = +inf returns the frame unchanged.
IqFrame awgn(IqFrame frame, double snr_db, std::uint64_t seed);

IqFrame flat_fade(IqFrame frame, cplx h);

// Same-length linear convolution: y[n] = sum_i taps[i] x[n - i*tap_spacing].
// The first (taps-1)*tap_spacing samples are filter transient.
IqFrame multipath(IqFrame frame, std::span<const cplx> taps, std::size_t tap_spacing = 1);

// I.i.d. CN(0, 10^(-decay*i/10)) taps, normalized to unit total power
// unless normalize is false.
cvec rayleigh_taps(std::size_t num_taps, double decay_db_per_tap, std::uint64_t seed, bool normalize = true);

// Fading first, then noise with variance P * power_gain / 10^(snr/10).
// P is reference_power when given, else the measured payload power of the
// input. Passing the pre-obfuscation power keeps the noise bit-identical
// between obfuscated and clean versions of one transmission.
IqFrame apply_channel(IqFrame frame, const ChannelSpec& spec, std::optional<double> reference_power = std::nullopt);

inline constexpr std::size_t mlsd_max_states = 4096;

// Viterbi sequence detection on the symbol-spaced model
//   r_n = sum_i taps[i] s_{n-i} + noise, s_{<0} = 0.
// `frame` holds pulse-shaped samples (matched-filtered and sampled
// internally) unless pulse is the identity, in which case it already holds
// symbol-rate observations. Throws state_space_too_large when
// M^(taps-1) > mlsd_max_states.
modem::Labels mlsd_equalize(const IqFrame& frame, std::span<const cplx> taps, Scheme scheme,
                            const dsp::PulseShape& pulse);

// Same detector on explicit symbol-rate observations.
modem::Labels mlsd_detect(std::span<const cplx> observations, std::span<const cplx> taps,
                          const modem::Constellation& constellation);

struct MmseOptions {
    std::size_t filter_len = 32;
    // Decision delay in symbols; negative selects the MSE-optimal delay.
    int delay = -1;
};

// Linear MMSE FIR equalizer for a symbol-spaced channel with unit-power
// symbols. Output sample n estimates the symbol sent at n.
IqFrame mmse_equalize(const IqFrame& frame, std::span<const cplx> taps, double noise_var,
                      const MmseOptions& options = {});

} // namespace sigobf::channel
