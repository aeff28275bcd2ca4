#include "sigobf/obfuscator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sigobf/error.hpp"
#include "sigobf/fft.hpp"

namespace sigobf::obf {
namespace {

constexpr double guidance_limit_hz = 100.0;

IqFrame mix(IqFrame frame, const ObfuscationParams& params, bool conjugate)
{
    frame.validate();
    if (!frame.payload_range)
        throw Error(ErrorKind::missing_payload_range, "frame has no payload range");
    const IndexRange r = *frame.payload_range;
    const cvec w = obf_waveform(params, r.size(), frame.sample_rate);
    for (std::size_t i = 0; i < w.size(); ++i)
        frame.samples[r.begin + i] *= conjugate ? std::conj(w[i]) : w[i];
    return frame;
}

} // namespace

void ObfuscationParams::validate() const
{
    if (!(delta_f > 0.0) || !(f_m > 0.0) || !std::isfinite(delta_f) || !std::isfinite(f_m))
        throw Error(ErrorKind::invalid_parameter, "delta_f and f_m must be positive and finite");
    if (!std::isfinite(modulation_index()) || !std::isfinite(t0))
        throw Error(ErrorKind::invalid_parameter, "modulation index and t0 must be finite");
}

cvec obf_waveform(const ObfuscationParams& params, std::size_t num_samples, double sample_rate)
{
    params.validate();
    if (num_samples == 0 || !(sample_rate > 0.0))
        throw Error(ErrorKind::invalid_parameter, "need num_samples >= 1 and sample_rate > 0");
    const double beta = params.modulation_index();
    const double w = 2.0 * std::numbers::pi * params.f_m;
    cvec out(num_samples);
    for (std::size_t n = 0; n < num_samples; ++n) {
        const double t = params.t0 + static_cast<double>(n) / sample_rate;
        out[n] = std::polar(1.0, beta * std::sin(w * t));
    }
    return out;
}

IqFrame apply(IqFrame frame, const ObfuscationParams& params) { return mix(std::move(frame), params, false); }

IqFrame remove(IqFrame frame, const ObfuscationParams& params) { return mix(std::move(frame), params, true); }

double occupied_bandwidth(std::span<const cplx> x, double sample_rate, double fraction)
{
    if (x.empty() || !(fraction > 0.0 && fraction < 1.0))
        throw Error(ErrorKind::invalid_parameter, "need samples and fraction in (0, 1)");
    std::size_t n = 1;
    while (n < 4 * x.size())
        n <<= 1;
    cvec buf(n);
    std::copy(x.begin(), x.end(), buf.begin());
    const cvec spec = fft::forward(buf);

    // Power per bin in ascending frequency order.
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = std::norm(spec[(k + n / 2) % n]);
        total += p[k];
    }
    if (!(total > 0.0))
        throw Error(ErrorKind::degenerate_input, "zero-energy signal");
    const double lo_target = total * (1.0 - fraction) / 2.0;
    const double hi_target = total * (1.0 + fraction) / 2.0;
    double acc = 0.0;
    std::size_t lo = 0, hi = n - 1;
    bool have_lo = false;
    for (std::size_t k = 0; k < n; ++k) {
        acc += p[k];
        if (!have_lo && acc >= lo_target) {
            lo = k;
            have_lo = true;
        }
        if (acc >= hi_target) {
            hi = k;
            break;
        }
    }
    return static_cast<double>(hi - lo + 1) * sample_rate / static_cast<double>(n);
}

BandwidthReport bandwidth_occupancy(const IqFrame& clean, const ObfuscationParams& params, double fraction)
{
    IqFrame whole = clean;
    if (!whole.payload_range)
        whole.payload_range = IndexRange{0, whole.size()};
    const IqFrame mixed = apply(whole, params);
    return {occupied_bandwidth(clean.samples, clean.sample_rate, fraction),
            occupied_bandwidth(mixed.samples, mixed.sample_rate, fraction)};
}

std::vector<std::string> guidance_warnings(const ObfuscationParams& params)
{
    std::vector<std::string> out;
    auto check = [&](const char* what, double v) {
        if (v > guidance_limit_hz) {
            std::ostringstream os;
            os << what << " = " << v << " Hz exceeds the " << guidance_limit_hz
               << " Hz guidance; check the occupied bandwidth of the mixed signal";
            out.push_back(os.str());
        }
    };
    check("delta_f", params.delta_f);
    check("f_m", params.f_m);
    return out;
}

} // namespace sigobf::obf
