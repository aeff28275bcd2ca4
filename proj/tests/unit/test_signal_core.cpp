#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sigobf/error.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/rng.hpp"
#include "sigobf/signal_core.hpp"

using namespace sigobf;
using namespace sigobf::dsp;

namespace {
IqFrame random_frame(std::size_t n, std::uint64_t seed, double fs = 1.0)
{
    Rng r(seed);
    IqFrame f;
    f.sample_rate = fs;
    f.samples.resize(n);
    for (auto& v : f.samples)
        v = r.complex_gaussian(1.0);
    return f;
}

double energy(const std::vector<double>& taps)
{
    double e = 0;
    for (double t : taps)
        e += t * t;
    return e;
}
} // namespace

TEST_CASE("RC 0.5 span 10 sps 8 gives 81 symmetric unit-energy taps peaking in the centre")
{
    const auto p = design_pulse(PulseKind::raised_cosine, 0.5, 10, 8);
    REQUIRE(p.taps.size() == 81);
    CHECK(p.delay == 40);
    CHECK(energy(p.taps) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < p.taps.size(); ++i) {
        CHECK(p.taps[i] == p.taps[p.taps.size() - 1 - i]);
        if (i != 40)
            CHECK(p.taps[i] < p.taps[40]);
    }
}

TEST_CASE("RC with zero rolloff is a sampled sinc")
{
    const auto p = design_pulse(PulseKind::raised_cosine, 0.0, 10, 8);
    const double peak = p.taps[p.delay];
    for (std::size_t i = 0; i < p.taps.size(); ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(p.delay)) / 8.0;
        const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
        CHECK(p.taps[i] / peak == doctest::Approx(sinc).epsilon(1e-12));
    }
}

TEST_CASE("RC has zero crossings at nonzero symbol instants")
{
    for (double beta : {0.0, 0.25, 0.5, 1.0}) {
        const auto p = design_pulse(PulseKind::raised_cosine, beta, 10, 8);
        for (int k = 1; k <= 5; ++k) {
            CHECK(std::abs(p.taps[p.delay + 8 * k]) < 1e-12 * p.taps[p.delay]);
            CHECK(std::abs(p.taps[p.delay - 8 * k]) < 1e-12 * p.taps[p.delay]);
        }
    }
}

TEST_CASE("RRC matched pair is Nyquist at symbol spacing")
{
    for (double beta : {0.22, 0.35, 0.5, 1.0}) {
        for (int sps : {2, 4, 8}) {
            const auto p = design_pulse(PulseKind::root_raised_cosine, beta, 10, sps);
            CHECK(p.taps.size() == static_cast<std::size_t>(10 * sps + 1));
            CHECK(energy(p.taps) == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t i = 0; i < p.taps.size(); ++i)
                CHECK(p.taps[i] == p.taps[p.taps.size() - 1 - i]);
            const auto cascade = oracle::direct_convolve(oracle::cvec(p.taps.begin(), p.taps.end()), p.taps);
            const std::size_t centre = p.taps.size() - 1;
            const double peak = cascade[centre].real();
            CHECK(peak == doctest::Approx(1.0).epsilon(1e-9));
            for (std::size_t k = centre % sps; k < cascade.size(); k += static_cast<std::size_t>(sps))
                if (k != centre)
                    CHECK(std::abs(cascade[k]) < 1e-6 * peak);
        }
    }
}

TEST_CASE("design_pulse rejects out-of-range parameters")
{
    CHECK_THROWS_AS(design_pulse(PulseKind::raised_cosine, -0.1, 10, 8), Error);
    CHECK_THROWS_AS(design_pulse(PulseKind::raised_cosine, 1.1, 10, 8), Error);
    CHECK_THROWS_AS(design_pulse(PulseKind::raised_cosine, 0.5, 1, 8), Error);
    CHECK_THROWS_AS(design_pulse(PulseKind::raised_cosine, 0.5, 10, 1), Error);
    try {
        design_pulse(PulseKind::root_raised_cosine, 2.0, 10, 8);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
}

TEST_CASE("normalize_power examples")
{
    IqFrame f;
    f.samples.assign(16, cplx(2.0, 0.0));
    const IqFrame n = normalize_power(f);
    for (const cplx& v : n.samples)
        CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-15);

    const IqFrame r = normalize_power(random_frame(1024, 1));
    CHECK(std::abs(mean_power(r.samples) - 1.0) < 1e-12);
    const IqFrame again = normalize_power(r);
    CHECK(oracle::max_abs_diff(again.samples, r.samples) < 1e-12);
}

TEST_CASE("normalize_power is invariant to positive scaling and rotates with complex scaling")
{
    const IqFrame x = random_frame(512, 2);
    const IqFrame nx = normalize_power(x);
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx c = rng.complex_gaussian(1.0) * std::exp(4.0 * rng.gaussian());
        IqFrame cx = x;
        for (auto& v : cx.samples)
            v *= c;
        const IqFrame ncx = normalize_power(cx);
        oracle::cvec rotated(nx.samples);
        for (auto& v : rotated)
            v *= c / std::abs(c);
        CHECK(oracle::max_abs_diff(ncx.samples, rotated) < 1e-12);

        IqFrame px = x;
        for (auto& v : px.samples)
            v *= std::abs(c);
        CHECK(oracle::max_abs_diff(normalize_power(px).samples, nx.samples) < 1e-12);
    }
}

TEST_CASE("normalize_power rejects degenerate frames")
{
    IqFrame z;
    z.samples.assign(8, cplx{});
    CHECK_THROWS_AS(normalize_power(z), Error);
    CHECK_THROWS_AS(normalize_power(IqFrame{}), Error);
}

TEST_CASE("convolve matches direct convolution")
{
    const IqFrame x = random_frame(37, 5);
    const std::vector<double> h{0.5, -1.0, 0.25, 2.0};
    CHECK(oracle::max_abs_diff(convolve(x.samples, h), oracle::direct_convolve(x.samples, h)) < 1e-12);
    const oracle::cvec hc{{1, 1}, {0, -2}, {0.5, 0}};
    CHECK(oracle::max_abs_diff(convolve(x.samples, hc), oracle::direct_convolve(x.samples, hc)) < 1e-12);
}

TEST_CASE("filter_and_resample of an impulse reproduces the pulse taps")
{
    const auto p = design_pulse(PulseKind::raised_cosine, 0.5, 4, 4);
    IqFrame imp;
    imp.samples.assign(10, cplx{});
    imp.samples[0] = 1.0;
    const IqFrame out = filter_and_resample(imp, p, 4);
    REQUIRE(out.size() == 40);
    for (std::size_t n = 0; n + p.delay < p.taps.size(); ++n)
        CHECK(out.samples[n].real() == doctest::Approx(p.taps[n + p.delay]));
    // a later impulse shows the causal half too
    imp.samples[0] = 0.0;
    imp.samples[5] = 1.0;
    const IqFrame later = filter_and_resample(imp, p, 4);
    for (std::size_t j = 0; j < p.taps.size(); ++j)
        CHECK(later.samples[20 + j - p.delay].real() == doctest::Approx(p.taps[j]));
}

TEST_CASE("filter_and_resample with an RC pulse is ISI-free at symbol instants")
{
    const auto p = design_pulse(PulseKind::raised_cosine, 0.5, 10, 8);
    Rng r(8);
    IqFrame sym;
    sym.samples.resize(200);
    for (auto& v : sym.samples)
        v = cplx(r.bit() ? 1.0 : -1.0, r.bit() ? 1.0 : -1.0);
    const IqFrame out = filter_and_resample(sym, p, 8);
    CHECK(out.size() == 1600);
    CHECK(out.sample_rate == 8.0);
    for (std::size_t k = 0; k < sym.size(); ++k)
        CHECK(std::abs(out.samples[8 * k] / p.taps[p.delay] - sym.samples[k]) < 1e-6);
}

TEST_CASE("filter_and_resample with factor 1 and the identity pulse is a no-op")
{
    const IqFrame x = random_frame(64, 9);
    const IqFrame y = filter_and_resample(x, PulseShape::identity(), 1);
    CHECK(y.samples == x.samples);
    CHECK_THROWS_AS(filter_and_resample(x, PulseShape::identity(), 0), Error);
}

TEST_CASE("spectrogram shape and non-negativity")
{
    const IqFrame x = random_frame(1000, 10);
    const auto s = spectrogram(x);
    CHECK(s.rows == (1000 - 128) / 32 + 1);
    CHECK(s.cols == 256);
    for (double v : s.magnitude)
        CHECK(v >= 0.0);
}

TEST_CASE("spectrogram of a zero frame is all zero")
{
    IqFrame z;
    z.samples.assign(512, cplx{});
    for (double v : spectrogram(z).magnitude)
        CHECK(v == 0.0);
}

TEST_CASE("spectrogram of a tone peaks at the nearest bin in every slice")
{
    const double fs = 1e6, tone = 123e3;
    IqFrame f;
    f.sample_rate = fs;
    for (int n = 0; n < 4096; ++n)
        f.samples.push_back(std::polar(1.0, 2.0 * std::numbers::pi * tone * n / fs));
    const auto s = spectrogram(f);
    std::size_t nearest = 0;
    for (std::size_t c = 0; c < s.cols; ++c)
        if (std::abs(s.bin_frequency(c) - tone) < std::abs(s.bin_frequency(nearest) - tone))
            nearest = c;
    for (std::size_t r = 0; r < s.rows; ++r)
        CHECK(s.peak_column(r) == nearest);
}

TEST_CASE("spectrogram peak tracks the instantaneous frequency of an obfuscated tone")
{
    const double fs = 1e6;
    const obf::ObfuscationParams p{100e3, 20.0, 0.0};
    IqFrame f;
    f.sample_rate = fs;
    f.samples.assign(50000, cplx(1.0, 0.0));
    f.payload_range = IndexRange{0, f.size()};
    f = obf::apply(f, p);
    SpectrogramParams sp;
    sp.window_len = 256;
    sp.hop = 256;
    sp.fft_len = 1024;
    const auto s = spectrogram(f, sp);
    const double bin = fs / 1024.0;
    for (std::size_t r = 0; r < s.rows; ++r) {
        const double expected = p.delta_f * std::cos(2.0 * std::numbers::pi * p.f_m * s.row_time(r));
        CHECK(std::abs(s.bin_frequency(s.peak_column(r)) - expected) <= bin);
    }
}

TEST_CASE("Parseval holds for a rectangular window with hop equal to the window")
{
    const IqFrame x = random_frame(1024, 12);
    SpectrogramParams sp;
    sp.window_len = 128;
    sp.hop = 128;
    sp.fft_len = 128;
    sp.window = WindowKind::rectangular;
    const auto s = spectrogram(x, sp);
    double spec = 0, time = 0;
    for (double v : s.magnitude)
        spec += v * v;
    for (const cplx& v : x.samples)
        time += std::norm(v);
    CHECK(std::abs(spec / 128.0 - time) < 1e-9 * time);
}

TEST_CASE("spectrogram rejects bad parameters")
{
    const IqFrame x = random_frame(100, 13);
    CHECK_THROWS_AS(spectrogram(x), Error); // shorter than the 128-sample window
    SpectrogramParams sp;
    sp.window_len = 64;
    sp.fft_len = 32;
    CHECK_THROWS_AS(spectrogram(x, sp), Error);
    sp.fft_len = 64;
    sp.hop = 0;
    CHECK_THROWS_AS(spectrogram(x, sp), Error);
}
