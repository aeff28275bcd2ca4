#include "sigobf/channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigobf/error.hpp"
#include "sigobf/rng.hpp"

namespace sigobf::channel {
namespace {

double payload_power(const IqFrame& frame)
{
    const IndexRange r = frame.payload_or_all();
    return dsp::mean_power(std::span<const cplx>(frame.samples).subspan(r.begin, r.size()));
}

} // namespace

ChannelSpec ChannelSpec::awgn(double snr_db, std::uint64_t seed)
{
    ChannelSpec s;
    s.kind = ChannelKind::awgn;
    s.snr_db = snr_db;
    s.seed = seed;
    return s;
}

ChannelSpec ChannelSpec::flat(cplx gain, double snr_db, std::uint64_t seed)
{
    ChannelSpec s = awgn(snr_db, seed);
    s.kind = ChannelKind::flat;
    s.gain = gain;
    return s;
}

ChannelSpec ChannelSpec::multipath(cvec taps, double snr_db, std::uint64_t seed, std::size_t tap_spacing)
{
    ChannelSpec s = awgn(snr_db, seed);
    s.kind = ChannelKind::multipath;
    s.taps = std::move(taps);
    s.tap_spacing = tap_spacing;
    return s;
}

void ChannelSpec::validate() const
{
    if (std::isnan(snr_db))
        throw Error(ErrorKind::invalid_parameter, "snr_db is NaN");
    switch (kind) {
    case ChannelKind::awgn:
        if (!taps.empty() || gain != cplx{1.0})
            throw Error(ErrorKind::invalid_parameter, "AWGN channel carries no gain or taps");
        break;
    case ChannelKind::flat:
        if (!taps.empty())
            throw Error(ErrorKind::invalid_parameter, "flat channel carries no taps");
        if (gain == cplx{})
            throw Error(ErrorKind::degenerate_input, "zero flat-fading gain");
        break;
    case ChannelKind::multipath:
        if (taps.empty() || taps.front() == cplx{})
            throw Error(ErrorKind::invalid_parameter, "multipath taps must be non-empty with a non-zero first tap");
        if (tap_spacing == 0)
            throw Error(ErrorKind::invalid_parameter, "tap_spacing must be >= 1");
        break;
    }
}

double ChannelSpec::power_gain() const
{
    switch (kind) {
    case ChannelKind::flat: return std::norm(gain);
    case ChannelKind::multipath: {
        double p = 0.0;
        for (const cplx& t : taps)
            p += std::norm(t);
        return p;
    }
    default: return 1.0;
    }
}

IqFrame add_noise(IqFrame frame, double noise_var, std::uint64_t seed)
{
    if (!(noise_var >= 0.0))
        throw Error(ErrorKind::invalid_parameter, "noise variance must be >= 0");
    if (noise_var == 0.0)
        return frame;
    Rng rng(seed);
    for (cplx& v : frame.samples)
        v += rng.complex_gaussian(noise_var);
    return frame;
}

IqFrame awgn(IqFrame frame, double snr_db, std::uint64_t seed)
{
    frame.validate();
    if (frame.samples.empty())
        throw Error(ErrorKind::degenerate_input, "empty frame");
    if (snr_db == noiseless)
        return frame;
    const double p = payload_power(frame);
    if (!(p > 0.0))
        throw Error(ErrorKind::degenerate_input, "zero-power frame has no defined SNR");
    return add_noise(std::move(frame), p / std::pow(10.0, snr_db / 10.0), seed);
}

IqFrame flat_fade(IqFrame frame, cplx h)
{
    if (h == cplx{})
        throw Error(ErrorKind::degenerate_input, "zero channel gain");
    for (cplx& v : frame.samples)
        v *= h;
    return frame;
}

IqFrame multipath(IqFrame frame, std::span<const cplx> taps, std::size_t tap_spacing)
{
    if (taps.empty() || std::all_of(taps.begin(), taps.end(), [](cplx t) { return t == cplx{}; }))
        throw Error(ErrorKind::invalid_parameter, "multipath needs at least one non-zero tap");
    if (tap_spacing == 0)
        throw Error(ErrorKind::invalid_parameter, "tap_spacing must be >= 1");
    const cvec& x = frame.samples;
    cvec y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx acc{};
        for (std::size_t i = 0; i < taps.size(); ++i) {
            const std::size_t lag = i * tap_spacing;
            if (lag > n)
                break;
            acc += taps[i] * x[n - lag];
        }
        y[n] = acc;
    }
    frame.samples = std::move(y);
    return frame;
}

cvec rayleigh_taps(std::size_t num_taps, double decay_db_per_tap, std::uint64_t seed, bool normalize)
{
    if (num_taps == 0 || !std::isfinite(decay_db_per_tap))
        throw Error(ErrorKind::invalid_parameter, "need num_taps >= 1 and a finite decay");
    Rng rng(seed);
    cvec taps(num_taps);
    double total = 0.0;
    for (std::size_t i = 0; i < num_taps; ++i) {
        const double power = std::pow(10.0, -decay_db_per_tap * static_cast<double>(i) / 10.0);
        taps[i] = rng.complex_gaussian(power);
        total += std::norm(taps[i]);
    }
    if (normalize) {
        const double g = 1.0 / std::sqrt(total);
        for (cplx& t : taps)
            t *= g;
    }
    return taps;
}

IqFrame apply_channel(IqFrame frame, const ChannelSpec& spec, std::optional<double> reference_power)
{
    spec.validate();
    frame.validate();
    const double p_ref = reference_power.value_or(payload_power(frame));
    switch (spec.kind) {
    case ChannelKind::awgn: break;
    case ChannelKind::flat: frame = flat_fade(std::move(frame), spec.gain); break;
    case ChannelKind::multipath: frame = multipath(std::move(frame), spec.taps, spec.tap_spacing); break;
    }
    if (spec.snr_db == noiseless)
        return frame;
    if (!(p_ref > 0.0))
        throw Error(ErrorKind::degenerate_input, "zero-power frame has no defined SNR");
    const double noise_var = p_ref * spec.power_gain() / std::pow(10.0, spec.snr_db / 10.0);
    return add_noise(std::move(frame), noise_var, spec.seed);
}

modem::Labels mlsd_detect(std::span<const cplx> obs, std::span<const cplx> taps, const modem::Constellation& c)
{
    if (taps.empty() || taps.front() == cplx{})
        throw Error(ErrorKind::invalid_parameter, "MLSD needs a non-zero first tap");
    const std::size_t m = c.size();
    const std::size_t memory = taps.size() - 1;
    std::size_t states = 1;
    for (std::size_t i = 0; i < memory; ++i) {
        states *= m;
        if (states > mlsd_max_states)
            throw Error(ErrorKind::state_space_too_large, "trellis exceeds " + std::to_string(mlsd_max_states) + " states");
    }

    // Symbol point per index in label order; state digit 0 is s_{n-1}.
    cvec points(m);
    for (unsigned l = 0; l < m; ++l)
        points[l] = c.point(l);

    // isi[v][state]: contribution of the v most recent symbols held in state.
    std::vector<cvec> isi(memory + 1, cvec(states));
    for (std::size_t st = 0; st < states; ++st) {
        std::size_t digits = st;
        cplx acc{};
        for (std::size_t i = 1; i <= memory; ++i) {
            acc += taps[i] * points[digits % m];
            digits /= m;
            isi[i][st] = acc;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> metric(states, inf), next(states);
    metric[0] = 0.0;
    const std::size_t n = obs.size();
    std::vector<std::uint32_t> from(n * states);

    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t valid = std::min(t, memory);
        std::fill(next.begin(), next.end(), inf);
        std::uint32_t* back = from.data() + t * states;
        for (std::size_t st = 0; st < states; ++st) {
            if (metric[st] == inf)
                continue;
            const cplx tail = isi[valid][st];
            const std::size_t shifted = (st * m) % states;
            for (std::size_t s = 0; s < m; ++s) {
                const double d = metric[st] + std::norm(obs[t] - taps[0] * points[s] - tail);
                const std::size_t ns = memory == 0 ? 0 : shifted + s;
                if (d < next[ns]) {
                    next[ns] = d;
                    back[ns] = static_cast<std::uint32_t>(st * m + s);
                }
            }
        }
        metric.swap(next);
    }

    modem::Labels out(n);
    if (n == 0)
        return out;
    std::size_t st = static_cast<std::size_t>(std::min_element(metric.begin(), metric.end()) - metric.begin());
    for (std::size_t t = n; t-- > 0;) {
        const std::uint32_t packed = from[t * states + st];
        out[t] = static_cast<unsigned>(packed % m);
        st = packed / m;
    }
    return out;
}

modem::Labels mlsd_equalize(const IqFrame& frame, std::span<const cplx> taps, Scheme scheme,
                            const dsp::PulseShape& pulse)
{
    if (!modem::is_linear(scheme))
        throw Error(ErrorKind::unsupported_scheme, std::string(modem::name(scheme)) + " is not a linear scheme");
    const cvec obs = modem::matched_filter_symbols(frame.samples, pulse);
    return mlsd_detect(obs, taps, modem::constellation(scheme));
}

IqFrame mmse_equalize(const IqFrame& frame, std::span<const cplx> taps, double noise_var, const MmseOptions& options)
{
    if (taps.empty() || options.filter_len == 0 || !(noise_var >= 0.0))
        throw Error(ErrorKind::invalid_parameter, "need taps, filter_len >= 1 and noise_var >= 0");
    if (std::all_of(taps.begin(), taps.end(), [](cplx t) { return t == cplx{}; }))
        throw Error(ErrorKind::invalid_parameter, "all-zero channel");

    const auto lf = static_cast<Eigen::Index>(options.filter_len);
    const auto lh = static_cast<Eigen::Index>(taps.size());
    const Eigen::Index span = lf + lh - 1;
    // Row r of Y_n = [y_n, ..., y_{n-lf+1}] sees s_{n-r-i} through taps[i].
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(lf, span);
    for (Eigen::Index r = 0; r < lf; ++r)
        for (Eigen::Index i = 0; i < lh; ++i)
            h(r, r + i) = taps[static_cast<std::size_t>(i)];

    Eigen::MatrixXcd r = h * h.adjoint();
    r.diagonal().array() += noise_var;
    const auto ldlt = r.ldlt();
    const Eigen::MatrixXcd gains = ldlt.solve(h); // column d: filter for delay d

    Eigen::Index delay = options.delay;
    if (delay < 0) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index d = 0; d < span; ++d) {
            const double mse = 1.0 - (h.col(d).adjoint() * gains.col(d))(0, 0).real();
            if (mse < best - 1e-12) {
                best = mse;
                delay = d;
            }
        }
    } else if (delay >= span) {
        throw Error(ErrorKind::invalid_parameter, "decision delay beyond the filter span");
    }
    const Eigen::VectorXcd g = gains.col(delay);

    const cvec& y = frame.samples;
    const auto len = static_cast<Eigen::Index>(y.size());
    IqFrame out = frame;
    for (Eigen::Index n = 0; n < len; ++n) {
        cplx acc{};
        const Eigen::Index m = n + delay;
        for (Eigen::Index row = 0; row < lf; ++row) {
            const Eigen::Index idx = m - row;
            if (idx >= 0 && idx < len)
                acc += std::conj(g(row)) * y[static_cast<std::size_t>(idx)];
        }
        out.samples[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

} // namespace sigobf::channel
