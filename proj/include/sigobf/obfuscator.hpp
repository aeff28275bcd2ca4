#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sigobf/types.hpp"

namespace sigobf::obf {

// Parameters of the FM obfuscating waveform
//   x_sp(t) = exp(j (delta_f / f_m) sin(2 pi f_m t)),
// whose instantaneous frequency is delta_f cos(2 pi f_m t).
// t0 is the waveform time at the first payload sample.
struct ObfuscationParams {
    double delta_f = 0.0; // Hz
    double f_m = 0.0;     // Hz
    double t0 = 0.0;      // s

    double modulation_index() const noexcept { return delta_f / f_m; }
    void validate() const;
};

cvec obf_waveform(const ObfuscationParams& params, std::size_t num_samples, double sample_rate);

// Multiplies the payload region by x_sp (sample 0 of the waveform at
// payload_range.begin). Samples outside the payload are left untouched.
IqFrame apply(IqFrame frame, const ObfuscationParams& params);

// Multiplies the payload region by conj(x_sp): the legitimate receiver's
// removal. Noise is rotated, never scaled.
IqFrame remove(IqFrame frame, const ObfuscationParams& params);

// Width of the band holding `fraction` of the signal energy (between the
// (1-fraction)/2 and (1+fraction)/2 quantiles of the periodogram), in Hz.
double occupied_bandwidth(std::span<const cplx> x, double sample_rate, double fraction = 0.99);

struct BandwidthReport {
    double clean_hz = 0.0;
    double obfuscated_hz = 0.0;
    double ratio() const noexcept { return obfuscated_hz / clean_hz; }
};

BandwidthReport bandwidth_occupancy(const IqFrame& clean, const ObfuscationParams& params,
                                    double fraction = 0.99);

// Soft checks against the published parameter guidance (both parameters at
// most 100 Hz). Returns human-readable warnings; never throws.
std::vector<std::string> guidance_warnings(const ObfuscationParams& params);

} // namespace sigobf::obf
