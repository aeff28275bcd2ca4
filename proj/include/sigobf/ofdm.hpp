#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigobf/types.hpp"

namespace sigobf::ofdm {

enum class CarrierUse { data, pilot, null };

struct OfdmConfig {
    std::size_t num_subcarriers = 64;
    std::size_t cp_len = 16;
    double subcarrier_spacing = 625e3; // Hz; sample rate = N * spacing
    std::vector<CarrierUse> carrier_mask; // empty means all data

    static OfdmConfig dataset_default(double sample_rate = 40e6);

    void validate() const;
    double sample_rate() const noexcept { return static_cast<double>(num_subcarriers) * subcarrier_spacing; }
    std::size_t symbol_len() const noexcept { return num_subcarriers + cp_len; }
    std::size_t num_data_carriers() const;
    CarrierUse use(std::size_t k) const { return carrier_mask.empty() ? CarrierUse::data : carrier_mask[k]; }
};

// Fills data carriers in order from `data`, pilots with 1+0j, nulls with 0.
// data.size() must equal num_data_carriers().
cvec place_carriers(std::span<const cplx> data, const OfdmConfig& config);
cvec extract_data(std::span<const cplx> freq_symbols, const OfdmConfig& config);

// x[n] = (1/sqrt(N)) sum_k X[k] e^{j2pi kn/N}, CP prepended. freq_symbols
// may hold several OFDM symbols back to back (length a multiple of N).
IqFrame ofdm_modulate(std::span<const cplx> freq_symbols, const OfdmConfig& config);

// Strips CP and applies the unitary DFT per OFDM symbol.
std::vector<cvec> ofdm_demodulate(const IqFrame& frame, const OfdmConfig& config);

// DFT of the zero-padded channel taps: H[k] = sum_i h_i e^{-j2pi ki/N}.
cvec channel_frequency_response(std::span<const cplx> taps, std::size_t num_subcarriers);

struct Equalized {
    cvec symbols;
    std::vector<bool> erased; // |H[k]| <= singular_threshold; symbol set to 0
    std::size_t num_erased() const;
};

inline constexpr double singular_threshold = 1e-9;

Equalized ofdm_equalize(std::span<const cplx> freq_symbols, std::span<const cplx> channel_freq_response);

} // namespace sigobf::ofdm
