#include "sigobf/signal_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sigobf/error.hpp"
#include "sigobf/fft.hpp"

namespace sigobf::dsp {
namespace {

constexpr double pi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x); }

// t in symbol periods.
double raised_cosine(double t, double beta)
{
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (2.0 * beta)) < 1e-12)
        return pi / 4.0 * sinc(1.0 / (2.0 * beta));
    const double d = 1.0 - 4.0 * beta * beta * t * t;
    return sinc(t) * std::cos(pi * beta * t) / d;
}

double root_raised_cosine(double t, double beta)
{
    if (t == 0.0)
        return 1.0 - beta + 4.0 * beta / pi;
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
        const double a = pi / (4.0 * beta);
        return beta / std::numbers::sqrt2 * ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
    }
    const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
    const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
    return num / den;
}

void normalize_energy(std::vector<double>& taps)
{
    double e = 0.0;
    for (double v : taps)
        e += v * v;
    const double g = 1.0 / std::sqrt(e);
    for (double& v : taps)
        v *= g;
}

// Truncation leaves the RRC autocorrelation slightly non-zero at multiples
// of the symbol period. Minimum-norm Gauss-Newton steps on the symmetric
// half of the taps drive those lags to zero.
void enforce_nyquist(std::vector<double>& taps, int span, int sps)
{
    const auto len = static_cast<int>(taps.size());
    const int half = len / 2;
    Eigen::MatrixXd jac(span, half + 1);
    Eigen::VectorXd residual(span);

    for (int iter = 0; iter < 60; ++iter) {
        double worst = 0.0;
        jac.setZero();
        for (int k = 1; k <= span; ++k) {
            const int lag = k * sps;
            double r = 0.0;
            for (int j = 0; j + lag < len; ++j)
                r += taps[j] * taps[j + lag];
            residual(k - 1) = r;
            worst = std::max(worst, std::abs(r));
            for (int j = 0; j < len; ++j) {
                double d = 0.0;
                if (j + lag < len) d += taps[j + lag];
                if (j - lag >= 0) d += taps[j - lag];
                jac(k - 1, std::min(j, len - 1 - j)) += d;
            }
        }
        if (worst < 1e-15)
            break;
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-residual);
        for (int j = 0; j < len; ++j)
            taps[j] += step(std::min(j, len - 1 - j));
        normalize_energy(taps);
    }
}

} // namespace

PulseShape PulseShape::identity()
{
    PulseShape p;
    p.kind = PulseKind::rectangular;
    p.rolloff = 0.0;
    p.span_symbols = 1;
    p.samples_per_symbol = 1;
    p.taps = {1.0};
    p.delay = 0;
    return p;
}

PulseShape PulseShape::rectangular(int samples_per_symbol)
{
    if (samples_per_symbol < 1)
        throw Error(ErrorKind::invalid_parameter, "samples_per_symbol must be >= 1");
    PulseShape p;
    p.kind = PulseKind::rectangular;
    p.rolloff = 0.0;
    p.span_symbols = 1;
    p.samples_per_symbol = samples_per_symbol;
    p.taps.assign(static_cast<std::size_t>(samples_per_symbol), 1.0 / std::sqrt(samples_per_symbol));
    p.delay = 0;
    return p;
}

PulseShape design_pulse(PulseKind kind, double rolloff, int span_symbols, int samples_per_symbol)
{
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw Error(ErrorKind::invalid_parameter, "rolloff must be in [0, 1]");
    if (span_symbols < 2 || samples_per_symbol < 2)
        throw Error(ErrorKind::invalid_parameter, "span and samples_per_symbol must be >= 2");
    if (kind == PulseKind::rectangular)
        return PulseShape::rectangular(samples_per_symbol);

    PulseShape p;
    p.kind = kind;
    p.rolloff = rolloff;
    p.span_symbols = span_symbols;
    p.samples_per_symbol = samples_per_symbol;
    const int len = span_symbols * samples_per_symbol + 1;
    const int half = len / 2;
    p.delay = static_cast<std::size_t>(half);
    p.taps.resize(static_cast<std::size_t>(len));
    for (int i = 0; i <= half; ++i) {
        const double t = static_cast<double>(half - i) / samples_per_symbol;
        const double v = kind == PulseKind::raised_cosine ? raised_cosine(t, rolloff) : root_raised_cosine(t, rolloff);
        p.taps[i] = v;
        p.taps[len - 1 - i] = v;
    }
    normalize_energy(p.taps);
    if (kind == PulseKind::root_raised_cosine)
        enforce_nyquist(p.taps, span_symbols, samples_per_symbol);
    return p;
}

double mean_power(std::span<const cplx> x)
{
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (const cplx& v : x)
        acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

IqFrame normalize_power(IqFrame frame)
{
    const double p = mean_power(frame.samples);
    if (!(p > 0.0))
        throw Error(ErrorKind::degenerate_input, "cannot normalize an empty or all-zero frame");
    const double g = 1.0 / std::sqrt(p);
    for (cplx& v : frame.samples)
        v *= g;
    return frame;
}

cvec convolve(std::span<const cplx> x, std::span<const double> h)
{
    if (x.empty() || h.empty())
        return {};
    cvec y(x.size() + h.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == cplx{})
            continue;
        for (std::size_t j = 0; j < h.size(); ++j)
            y[i + j] += x[i] * h[j];
    }
    return y;
}

cvec convolve(std::span<const cplx> x, std::span<const cplx> h)
{
    if (x.empty() || h.empty())
        return {};
    cvec y(x.size() + h.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == cplx{})
            continue;
        for (std::size_t j = 0; j < h.size(); ++j)
            y[i + j] += x[i] * h[j];
    }
    return y;
}

IqFrame filter_and_resample(const IqFrame& frame, const PulseShape& pulse, int upsample_factor)
{
    if (upsample_factor < 1)
        throw Error(ErrorKind::invalid_parameter, "upsample_factor must be >= 1");
    if (pulse.taps.empty())
        throw Error(ErrorKind::invalid_parameter, "pulse has no taps");
    const auto factor = static_cast<std::size_t>(upsample_factor);
    cvec stuffed(frame.size() * factor);
    for (std::size_t i = 0; i < frame.size(); ++i)
        stuffed[i * factor] = frame.samples[i];
    cvec full = convolve(stuffed, pulse.taps);

    IqFrame out;
    out.sample_rate = frame.sample_rate * static_cast<double>(factor);
    out.label = frame.label;
    out.samples.assign(stuffed.size(), cplx{});
    for (std::size_t n = 0; n < out.samples.size() && n + pulse.delay < full.size(); ++n)
        out.samples[n] = full[n + pulse.delay];
    if (frame.payload_range)
        out.payload_range = IndexRange{frame.payload_range->begin * factor, frame.payload_range->end * factor};
    return out;
}

double Spectrogram::bin_frequency(std::size_t c) const
{
    const auto n = static_cast<double>(params.fft_len);
    return (static_cast<double>(c) - std::floor(n / 2.0)) * sample_rate / n;
}

double Spectrogram::row_time(std::size_t r) const
{
    return (static_cast<double>(r * params.hop) + static_cast<double>(params.window_len) / 2.0) / sample_rate;
}

std::size_t Spectrogram::peak_column(std::size_t r) const
{
    const auto first = magnitude.begin() + static_cast<std::ptrdiff_t>(r * cols);
    return static_cast<std::size_t>(std::max_element(first, first + static_cast<std::ptrdiff_t>(cols)) - first);
}

Spectrogram spectrogram(const IqFrame& frame, const SpectrogramParams& params)
{
    if (params.window_len == 0 || params.hop == 0 || params.window_len > params.fft_len)
        throw Error(ErrorKind::invalid_parameter, "need 1 <= window_len <= fft_len and hop >= 1");
    if (frame.size() < params.window_len)
        throw Error(ErrorKind::invalid_parameter, "frame shorter than the window");

    std::vector<double> window(params.window_len, 1.0);
    if (params.window == WindowKind::hann) {
        for (std::size_t n = 0; n < window.size(); ++n)
            window[n] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(n) / static_cast<double>(window.size())));
    }

    Spectrogram s;
    s.params = params;
    s.sample_rate = frame.sample_rate;
    s.rows = (frame.size() - params.window_len) / params.hop + 1;
    s.cols = params.fft_len;
    s.magnitude.assign(s.rows * s.cols, 0.0);

    const std::size_t shift = params.fft_len / 2;
    cvec segment(params.fft_len);
    for (std::size_t r = 0; r < s.rows; ++r) {
        std::fill(segment.begin(), segment.end(), cplx{});
        const std::size_t start = r * params.hop;
        for (std::size_t n = 0; n < params.window_len; ++n)
            segment[n] = frame.samples[start + n] * window[n];
        const cvec spectrum = fft::forward(segment);
        for (std::size_t k = 0; k < params.fft_len; ++k)
            s.magnitude[r * s.cols + (k + shift) % params.fft_len] = std::abs(spectrum[k]);
    }
    return s;
}

} // namespace sigobf::dsp
