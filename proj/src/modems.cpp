#include "sigobf/modems.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "sigobf/error.hpp"
#include "sigobf/fft.hpp"

namespace sigobf::modem {
namespace {

constexpr double pi = std::numbers::pi;

unsigned gray(unsigned i) { return i ^ (i >> 1); }

Constellation make_psk(int bits, double phase_offset)
{
    Constellation c;
    c.bits_per_symbol = bits;
    const unsigned m = 1u << bits;
    c.points.resize(m);
    c.label_to_point.resize(m);
    for (unsigned i = 0; i < m; ++i) {
        cplx v = std::polar(1.0, phase_offset + 2.0 * pi * i / m);
        if (std::abs(v.real()) < 1e-15)
            v.real(0.0);
        if (std::abs(v.imag()) < 1e-15)
            v.imag(0.0);
        c.points[i] = v;
        c.label_to_point[gray(i)] = i;
    }
    return c;
}

// Square QAM with Gray-coded axes; I bits are the high half of the label.
Constellation make_qam(int bits)
{
    Constellation c;
    c.bits_per_symbol = bits;
    const unsigned side = 1u << (bits / 2);
    const unsigned m = side * side;
    c.points.resize(m);
    c.label_to_point.resize(m);
    double energy = 0.0;
    for (unsigned i = 0; i < side; ++i) {
        for (unsigned q = 0; q < side; ++q) {
            const unsigned p = i * side + q;
            c.points[p] = {2.0 * i - (side - 1.0), 2.0 * q - (side - 1.0)};
            energy += std::norm(c.points[p]);
            c.label_to_point[(gray(i) << (bits / 2)) | gray(q)] = p;
        }
    }
    const double g = 1.0 / std::sqrt(energy / m);
    for (auto& p : c.points)
        p *= g;
    return c;
}

Constellation make_pam4()
{
    Constellation c;
    c.bits_per_symbol = 2;
    c.points.resize(4);
    c.label_to_point.resize(4);
    for (unsigned i = 0; i < 4; ++i) {
        c.points[i] = (2.0 * i - 3.0) / std::sqrt(5.0);
        c.label_to_point[gray(i)] = i;
    }
    return c;
}

std::vector<double> gaussian_frequency_pulse(int sps, const GfskParams& params)
{
    const int len = params.span_symbols * sps + 1;
    const int half = len / 2;
    std::vector<double> g(static_cast<std::size_t>(len));
    const double bt = params.bt;
    double sum = 0.0;
    for (int n = 0; n < len; ++n) {
        const double t = static_cast<double>(n - half) / sps;
        g[n] = std::exp(-2.0 * pi * pi * bt * bt * t * t / std::numbers::ln2);
        sum += g[n];
    }
    for (double& v : g)
        v /= sum;
    return g;
}

void check_pulse(const dsp::PulseShape& pulse)
{
    if (pulse.taps.empty() || pulse.samples_per_symbol < 1)
        throw Error(ErrorKind::invalid_parameter, "pulse has no taps");
}

} // namespace

bool is_digital(Scheme s) noexcept { return !is_analog(s); }

bool is_analog(Scheme s) noexcept { return s == Scheme::BFM || s == Scheme::DSBAM || s == Scheme::SSBAM; }

bool is_linear(Scheme s) noexcept { return is_digital(s) && s != Scheme::GFSK; }

std::string_view name(Scheme s) noexcept
{
    switch (s) {
    case Scheme::BPSK: return "BPSK";
    case Scheme::QPSK: return "QPSK";
    case Scheme::PSK8: return "8PSK";
    case Scheme::QAM16: return "16QAM";
    case Scheme::QAM64: return "64QAM";
    case Scheme::PAM4: return "PAM4";
    case Scheme::GFSK: return "GFSK";
    case Scheme::BFM: return "B-FM";
    case Scheme::DSBAM: return "DSB-AM";
    case Scheme::SSBAM: return "SSB-AM";
    }
    return "?";
}

Scheme scheme_from_name(std::string_view text)
{
    auto fold = [](std::string_view v) {
        std::string out;
        for (char ch : v)
            if (ch != '-' && ch != '_')
                out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        return out;
    };
    const std::string key = fold(text);
    for (Scheme s : all_schemes)
        if (fold(name(s)) == key)
            return s;
    if (key == "PSK8") return Scheme::PSK8;
    if (key == "QAM16") return Scheme::QAM16;
    if (key == "QAM64") return Scheme::QAM64;
    throw Error(ErrorKind::invalid_parameter, "unknown modulation '" + std::string(text) + "'");
}

unsigned Constellation::decide(cplx y) const noexcept
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::norm(y - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return point_to_label_[best];
}

const Constellation& constellation(Scheme s)
{
    static const auto table = [] {
        std::array<Constellation, 6> t{make_psk(1, 0.0), make_psk(2, pi / 4.0), make_psk(3, 0.0),
                                       make_qam(4),      make_qam(6),           make_pam4()};
        for (auto& c : t) {
            c.point_to_label_.resize(c.points.size());
            for (unsigned l = 0; l < c.label_to_point.size(); ++l)
                c.point_to_label_[c.label_to_point[l]] = l;
        }
        return t;
    }();
    switch (s) {
    case Scheme::BPSK: return table[0];
    case Scheme::QPSK: return table[1];
    case Scheme::PSK8: return table[2];
    case Scheme::QAM16: return table[3];
    case Scheme::QAM64: return table[4];
    case Scheme::PAM4: return table[5];
    default: throw Error(ErrorKind::unsupported_scheme, std::string(name(s)) + " has no constellation");
    }
}

int bits_per_symbol(Scheme s)
{
    if (s == Scheme::GFSK)
        return 1;
    return constellation(s).bits_per_symbol;
}

Labels bits_to_labels(std::span<const std::uint8_t> bits, int bps)
{
    if (bps < 1 || bits.size() % static_cast<std::size_t>(bps) != 0)
        throw Error(ErrorKind::invalid_length, "bit count not a multiple of bits_per_symbol");
    Labels out(bits.size() / static_cast<std::size_t>(bps));
    for (std::size_t k = 0; k < out.size(); ++k) {
        unsigned v = 0;
        for (int b = 0; b < bps; ++b)
            v = (v << 1) | (bits[k * static_cast<std::size_t>(bps) + static_cast<std::size_t>(b)] & 1u);
        out[k] = v;
    }
    return out;
}

Bits labels_to_bits(std::span<const unsigned> labels, int bps)
{
    Bits out;
    out.reserve(labels.size() * static_cast<std::size_t>(bps));
    for (unsigned v : labels)
        for (int b = bps - 1; b >= 0; --b)
            out.push_back(static_cast<std::uint8_t>((v >> b) & 1u));
    return out;
}

Bits random_bits(std::size_t count, Rng& rng)
{
    Bits out(count);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng.bit());
    return out;
}

cvec map_labels(std::span<const unsigned> labels, Scheme s)
{
    const Constellation& c = constellation(s);
    cvec out(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] >= c.size())
            throw Error(ErrorKind::invalid_parameter, "label out of range");
        out[k] = c.point(labels[k]);
    }
    return out;
}

cvec map_symbols(std::span<const std::uint8_t> bits, Scheme s)
{
    const Constellation& c = constellation(s);
    const Labels labels = bits_to_labels(bits, c.bits_per_symbol);
    return map_labels(labels, s);
}

IqFrame shape_symbols(std::span<const cplx> symbols, const dsp::PulseShape& pulse, double sample_rate)
{
    check_pulse(pulse);
    IqFrame out;
    out.sample_rate = sample_rate;
    if (symbols.empty())
        return out;
    const auto sps = static_cast<std::size_t>(pulse.samples_per_symbol);
    cvec stuffed((symbols.size() - 1) * sps + 1);
    const double gain = std::sqrt(static_cast<double>(sps));
    for (std::size_t k = 0; k < symbols.size(); ++k)
        stuffed[k * sps] = symbols[k] * gain;
    out.samples = dsp::convolve(stuffed, pulse.taps);
    return out;
}

IqFrame modulate_gfsk(std::span<const std::uint8_t> bits, int sps, double sample_rate, const GfskParams& params)
{
    if (sps < 1 || !(params.bt > 0.0) || !(params.modulation_index > 0.0) || params.span_symbols < 1)
        throw Error(ErrorKind::invalid_parameter, "invalid GFSK parameters");
    IqFrame out;
    out.sample_rate = sample_rate;
    if (bits.empty())
        return out;
    const auto n_sps = static_cast<std::size_t>(sps);
    cvec nrz(bits.size() * n_sps);
    for (std::size_t k = 0; k < bits.size(); ++k)
        std::fill_n(nrz.begin() + static_cast<std::ptrdiff_t>(k * n_sps), n_sps, cplx{bits[k] ? -1.0 : 1.0});
    const std::vector<double> g = gaussian_frequency_pulse(sps, params);
    const cvec freq = dsp::convolve(nrz, g);

    out.samples.resize(freq.size());
    const double step = pi * params.modulation_index / static_cast<double>(sps);
    double phase = 0.0;
    for (std::size_t n = 0; n < freq.size(); ++n) {
        phase += step * freq[n].real();
        out.samples[n] = std::polar(1.0, phase);
    }
    return out;
}

Bits demod_gfsk(const IqFrame& frame, std::size_t num_bits, int sps, const GfskParams& params)
{
    const auto n_sps = static_cast<std::size_t>(sps);
    const std::size_t delay = static_cast<std::size_t>(params.span_symbols) * n_sps / 2;
    if (frame.size() < num_bits * n_sps + delay)
        throw Error(ErrorKind::invalid_length, "frame too short for the requested bits");
    Bits out(num_bits);
    for (std::size_t k = 0; k < num_bits; ++k) {
        double acc = 0.0;
        const std::size_t first = k * n_sps + delay;
        for (std::size_t n = first; n < first + n_sps; ++n) {
            const cplx prev = n == 0 ? cplx{1.0} : frame.samples[n - 1];
            acc += std::arg(frame.samples[n] * std::conj(prev));
        }
        out[k] = acc < 0.0 ? 1 : 0;
    }
    return out;
}

IqFrame modulate_digital(std::span<const std::uint8_t> bits, Scheme s, int sps, const dsp::PulseShape& pulse,
                         double sample_rate)
{
    if (!is_digital(s))
        throw Error(ErrorKind::unsupported_scheme, std::string(name(s)) + " is not digital");
    IqFrame out;
    if (s == Scheme::GFSK) {
        out = modulate_gfsk(bits, sps, sample_rate);
    } else {
        if (pulse.samples_per_symbol != sps)
            throw Error(ErrorKind::invalid_parameter, "pulse designed for a different samples_per_symbol");
        out = shape_symbols(map_symbols(bits, s), pulse, sample_rate);
    }
    out.label = s;
    return out;
}

cvec matched_filter_symbols(std::span<const cplx> samples, const dsp::PulseShape& pulse)
{
    check_pulse(pulse);
    const std::size_t len = pulse.taps.size();
    const auto sps = static_cast<std::size_t>(pulse.samples_per_symbol);
    if (samples.size() < len)
        return {};
    const std::size_t count = (samples.size() - len) / sps + 1;
    const double gain = 1.0 / std::sqrt(static_cast<double>(sps));
    cvec out(count);
    for (std::size_t k = 0; k < count; ++k) {
        cplx acc{};
        const cplx* x = samples.data() + k * sps;
        for (std::size_t j = 0; j < len; ++j)
            acc += x[j] * pulse.taps[j];
        out[k] = acc * gain;
    }
    return out;
}

Labels demod_hard(const IqFrame& frame, Scheme s, const dsp::PulseShape& pulse, cplx channel_gain)
{
    if (!is_linear(s))
        throw Error(ErrorKind::unsupported_scheme, std::string(name(s)) + " needs its own demodulator");
    if (channel_gain == cplx{})
        throw Error(ErrorKind::degenerate_input, "zero channel gain");
    const Constellation& c = constellation(s);
    const cvec y = matched_filter_symbols(frame.samples, pulse);
    Labels out(y.size());
    const cplx inv = 1.0 / channel_gain;
    for (std::size_t k = 0; k < y.size(); ++k)
        out[k] = c.decide(y[k] * inv);
    return out;
}

cvec analytic_signal(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n == 0)
        return {};
    cvec buf(x.begin(), x.end());
    cvec spec = fft::forward(buf);
    // Keep DC (and Nyquist for even n), double positive, zero negative bins.
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n)
            spec[k] *= 2.0;
        else if (2 * k > n)
            spec[k] = 0.0;
    }
    cvec out = fft::inverse(spec);
    for (auto& v : out)
        v /= static_cast<double>(n);
    return out;
}

IqFrame modulate_analog(std::span<const double> message, Scheme s, const AnalogParams& params)
{
    if (!is_analog(s))
        throw Error(ErrorKind::unsupported_scheme, std::string(name(s)) + " is not analog");
    if (!(params.sample_rate > 0.0))
        throw Error(ErrorKind::invalid_parameter, "sample_rate must be positive");
    for (double m : message)
        if (!(std::abs(m) <= 1.0 + 1e-12))
            throw Error(ErrorKind::invalid_parameter, "message exceeds unit magnitude");

    IqFrame out;
    out.sample_rate = params.sample_rate;
    out.label = s;
    out.samples.resize(message.size());
    switch (s) {
    case Scheme::BFM: {
        const double k = 2.0 * pi * params.fm_deviation_hz / params.sample_rate;
        double phase = 0.0;
        for (std::size_t n = 0; n < message.size(); ++n) {
            phase += k * message[n];
            out.samples[n] = std::polar(1.0, phase);
        }
        break;
    }
    case Scheme::DSBAM:
        if (!(params.am_index > 0.0 && params.am_index <= 1.0))
            throw Error(ErrorKind::invalid_parameter, "AM modulation index must be in (0, 1]");
        for (std::size_t n = 0; n < message.size(); ++n)
            out.samples[n] = 1.0 + params.am_index * message[n];
        break;
    case Scheme::SSBAM: {
        if (!(params.am_index > 0.0 && params.am_index <= 1.0))
            throw Error(ErrorKind::invalid_parameter, "AM modulation index must be in (0, 1]");
        cvec a = analytic_signal(message);
        for (std::size_t n = 0; n < a.size(); ++n) {
            const cplx v = params.sideband == Sideband::upper ? a[n] : std::conj(a[n]);
            out.samples[n] = params.am_index * v;
        }
        break;
    }
    default: break;
    }
    return out;
}

std::vector<double> band_limited_message(std::size_t length, double cutoff_hz, double sample_rate, Rng& rng)
{
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0))
        throw Error(ErrorKind::invalid_parameter, "cutoff must lie in (0, fs/2)");
    constexpr int half = 64;
    std::vector<double> h(2 * half + 1);
    const double fc = cutoff_hz / sample_rate;
    for (int n = -half; n <= half; ++n) {
        const double ideal = n == 0 ? 2.0 * fc : std::sin(2.0 * pi * fc * n) / (pi * n);
        const double w = 0.54 + 0.46 * std::cos(pi * n / half);
        h[static_cast<std::size_t>(n + half)] = ideal * w;
    }
    std::vector<double> noise(length + h.size() - 1);
    for (double& v : noise)
        v = rng.gaussian();
    std::vector<double> out(length, 0.0);
    double peak = 0.0;
    for (std::size_t n = 0; n < length; ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j)
            acc += h[j] * noise[n + h.size() - 1 - j];
        out[n] = acc;
        peak = std::max(peak, std::abs(acc));
    }
    if (peak > 0.0)
        for (double& v : out)
            v /= peak;
    return out;
}

std::vector<double> multitone_message(std::size_t length, std::span<const double> tone_hz, double sample_rate)
{
    std::vector<double> out(length, 0.0);
    double peak = 0.0;
    for (std::size_t n = 0; n < length; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        for (double f : tone_hz)
            out[n] += std::cos(2.0 * pi * f * t);
        peak = std::max(peak, std::abs(out[n]));
    }
    if (peak > 0.0)
        for (double& v : out)
            v /= peak;
    return out;
}

} // namespace sigobf::modem
