#include "sigobf/ofdm.hpp"

#include <algorithm>
#include <cmath>

#include "sigobf/error.hpp"
#include "sigobf/fft.hpp"

namespace sigobf::ofdm {

OfdmConfig OfdmConfig::dataset_default(double sample_rate)
{
    OfdmConfig c;
    c.num_subcarriers = 64;
    c.cp_len = 16;
    c.subcarrier_spacing = sample_rate / 64.0;
    return c;
}

void OfdmConfig::validate() const
{
    if (num_subcarriers == 0)
        throw Error(ErrorKind::invalid_parameter, "num_subcarriers must be positive");
    if (cp_len >= num_subcarriers)
        throw Error(ErrorKind::invalid_parameter, "cp_len must be shorter than the symbol");
    if (!(subcarrier_spacing > 0.0))
        throw Error(ErrorKind::invalid_parameter, "subcarrier_spacing must be positive");
    if (!carrier_mask.empty() && carrier_mask.size() != num_subcarriers)
        throw Error(ErrorKind::invalid_parameter, "carrier_mask length differs from num_subcarriers");
    if (num_data_carriers() == 0)
        throw Error(ErrorKind::invalid_parameter, "no data subcarriers");
}

std::size_t OfdmConfig::num_data_carriers() const
{
    if (carrier_mask.empty())
        return num_subcarriers;
    return static_cast<std::size_t>(std::count(carrier_mask.begin(), carrier_mask.end(), CarrierUse::data));
}

cvec place_carriers(std::span<const cplx> data, const OfdmConfig& config)
{
    config.validate();
    if (data.size() != config.num_data_carriers())
        throw Error(ErrorKind::invalid_length, "data length differs from the number of data carriers");
    cvec out(config.num_subcarriers);
    std::size_t d = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        switch (config.use(k)) {
        case CarrierUse::data: out[k] = data[d++]; break;
        case CarrierUse::pilot: out[k] = 1.0; break;
        case CarrierUse::null: out[k] = 0.0; break;
        }
    }
    return out;
}

cvec extract_data(std::span<const cplx> freq_symbols, const OfdmConfig& config)
{
    if (freq_symbols.size() != config.num_subcarriers)
        throw Error(ErrorKind::invalid_length, "expected one OFDM symbol");
    cvec out;
    out.reserve(config.num_data_carriers());
    for (std::size_t k = 0; k < freq_symbols.size(); ++k)
        if (config.use(k) == CarrierUse::data)
            out.push_back(freq_symbols[k]);
    return out;
}

IqFrame ofdm_modulate(std::span<const cplx> freq_symbols, const OfdmConfig& config)
{
    config.validate();
    const std::size_t n = config.num_subcarriers;
    if (freq_symbols.empty() || freq_symbols.size() % n != 0)
        throw Error(ErrorKind::invalid_length, "frequency symbols must be a non-empty multiple of N");
    const std::size_t count = freq_symbols.size() / n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    IqFrame out;
    out.sample_rate = config.sample_rate();
    out.samples.reserve(count * config.symbol_len());
    for (std::size_t s = 0; s < count; ++s) {
        cvec body = fft::inverse(freq_symbols.subspan(s * n, n));
        for (auto& v : body)
            v *= scale;
        out.samples.insert(out.samples.end(), body.end() - static_cast<std::ptrdiff_t>(config.cp_len), body.end());
        out.samples.insert(out.samples.end(), body.begin(), body.end());
    }
    return out;
}

std::vector<cvec> ofdm_demodulate(const IqFrame& frame, const OfdmConfig& config)
{
    config.validate();
    const std::size_t len = config.symbol_len();
    if (frame.size() % len != 0)
        throw Error(ErrorKind::invalid_length, "frame length is not a multiple of N + cp_len");
    const std::size_t n = config.num_subcarriers;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cvec> out;
    out.reserve(frame.size() / len);
    for (std::size_t start = 0; start < frame.size(); start += len) {
        cvec x = fft::forward(std::span<const cplx>(frame.samples).subspan(start + config.cp_len, n));
        for (auto& v : x)
            v *= scale;
        out.push_back(std::move(x));
    }
    return out;
}

cvec channel_frequency_response(std::span<const cplx> taps, std::size_t num_subcarriers)
{
    if (taps.size() > num_subcarriers)
        throw Error(ErrorKind::invalid_length, "more taps than subcarriers");
    cvec padded(num_subcarriers);
    std::copy(taps.begin(), taps.end(), padded.begin());
    return fft::forward(padded);
}

std::size_t Equalized::num_erased() const
{
    return static_cast<std::size_t>(std::count(erased.begin(), erased.end(), true));
}

Equalized ofdm_equalize(std::span<const cplx> freq_symbols, std::span<const cplx> channel_freq_response)
{
    if (freq_symbols.size() != channel_freq_response.size())
        throw Error(ErrorKind::invalid_length, "symbol and channel response lengths differ");
    Equalized out;
    out.symbols.resize(freq_symbols.size());
    out.erased.assign(freq_symbols.size(), false);
    for (std::size_t k = 0; k < freq_symbols.size(); ++k) {
        if (std::abs(channel_freq_response[k]) <= singular_threshold) {
            out.erased[k] = true;
            continue;
        }
        out.symbols[k] = freq_symbols[k] / channel_freq_response[k];
    }
    return out;
}

} // namespace sigobf::ofdm
