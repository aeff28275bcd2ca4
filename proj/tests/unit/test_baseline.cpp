#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <unistd.h>

#include "sigobf/baseline.hpp"
#include "sigobf/error.hpp"
#include "sigobf/framegen.hpp"
#include "sigobf/modems.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/rng.hpp"

using namespace sigobf;
using namespace sigobf::baseline;
namespace fs = std::filesystem;

namespace {

IqFrame from_samples(cvec x, std::optional<Scheme> label = std::nullopt)
{
    IqFrame f;
    f.samples = std::move(x);
    f.sample_rate = 1.0;
    f.label = label;
    return f;
}

cvec random_symbols(Scheme s, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    const auto bits = modem::random_bits(n * static_cast<std::size_t>(modem::bits_per_symbol(s)), rng);
    return modem::map_symbols(bits, s);
}

// Digital frames at a fixed SNR; i % 7 picks the scheme, (i / 7) % pairs picks the obfuscation.
std::vector<framegen::GeneratedFrame> digital_frames(std::size_t count, std::uint64_t master, double snr,
                                                     std::vector<std::optional<obf::ObfuscationParams>> pairs)
{
    auto c = framegen::DatasetConfig::dataset1(100);
    c.profile = "custom";
    c.schemes.assign(std::begin(modem::digital_schemes), std::end(modem::digital_schemes));
    c.snr_grid = {snr};
    c.obf_pairs = std::move(pairs);
    c.train_count = count;
    c.val_count = 0;
    c.test_count = 0;
    c.master_seed = master;
    c.threads = 4;
    return framegen::generate_frames(c, 0, count);
}

std::vector<IqFrame> labelled(const std::vector<framegen::GeneratedFrame>& g, bool equalize = false)
{
    std::vector<IqFrame> out;
    for (const auto& f : g) {
        IqFrame x = f.samples;
        x.label = f.record.label;
        if (equalize && f.record.obf) {
            x.payload_range = IndexRange{0, x.size()};
            x = obf::remove(std::move(x), *f.record.obf);
        }
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace

TEST_CASE("cumulants of noiseless symbol streams match their closed forms")
{
    // BPSK: E[x^2] = 1, E[x^4] = 1, so c40 = 1 - 3 = -2 and c42 = 1 - 1 - 2 = -2.
    const auto b = extract_features(from_samples(random_symbols(Scheme::BPSK, 4096, 3)));
    CHECK(b.c20 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.c40 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.c42 == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(b.envelope_kurtosis == 0.0);

    // QPSK: E[x^2] averages to ~0, x^4 = -1 for every point, |x| = 1.
    const auto q = extract_features(from_samples(random_symbols(Scheme::QPSK, 4096, 4)));
    CHECK(q.c20 < 0.05);
    CHECK(q.c40 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(q.c42 == doctest::Approx(-1.0).epsilon(0.01));

    // 16QAM: E|x|^4 = 1.32, c40 = c42 = -0.68.
    const auto m = extract_features(from_samples(random_symbols(Scheme::QAM16, 1 << 14, 5)));
    CHECK(m.c40 == doctest::Approx(0.68).epsilon(0.05));
    CHECK(m.c42 == doctest::Approx(-0.68).epsilon(0.05));
}

TEST_CASE("cumulants of circular Gaussian noise are near zero")
{
    Rng rng(11);
    cvec x(1 << 15);
    for (auto& v : x)
        v = rng.complex_gaussian(1.0);
    const auto f = extract_features(from_samples(x));
    CHECK(f.c20 < 0.03);
    CHECK(f.c40 < 0.06);
    CHECK(f.c41 < 0.06);
    CHECK(std::abs(f.c42) < 0.06);
    CHECK(std::abs(f.spectral_symmetry) < 0.03);
}

TEST_CASE("spectral symmetry and envelope concentration on synthetic inputs")
{
    const std::size_t n = 1024;
    cvec up(n), down(n), am(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ph = 2.0 * std::numbers::pi * 37.0 * static_cast<double>(i) / static_cast<double>(n);
        up[i] = std::polar(1.0, ph);
        down[i] = std::conj(up[i]);
        // Envelope 1 + 0.5 cos(2 pi 16 i / n): the centred envelope has a single
        // line of height (0.25 n)^2, so the concentration is n / 16.
        const double env = 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * 16.0 * static_cast<double>(i) / n);
        am[i] = env * std::polar(1.0, 0.3 * static_cast<double>(i));
    }
    CHECK(extract_features(from_samples(up)).spectral_symmetry == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(extract_features(from_samples(down)).spectral_symmetry == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(extract_features(from_samples(up)).max_psd_concentration < 1e-12);
    CHECK(extract_features(from_samples(am)).max_psd_concentration ==
          doctest::Approx(static_cast<double>(n) / 16.0).epsilon(1e-9));
}

TEST_CASE("features are invariant to complex scaling")
{
    const cvec x = random_symbols(Scheme::PSK8, 2048, 21);
    cvec y = x;
    const cplx g = std::polar(3.7e-4, 0.9);
    for (auto& v : y)
        v *= g;
    const auto a = extract_features(from_samples(x)).values();
    const auto b = extract_features(from_samples(y)).values();
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-9);
}

TEST_CASE("features use only the payload range")
{
    cvec x = random_symbols(Scheme::QPSK, 1024, 8);
    IqFrame f = from_samples(x);
    const auto whole = extract_features(f).values();
    cvec padded(500, cplx(9.0, -4.0));
    padded.insert(padded.end(), x.begin(), x.end());
    IqFrame g = from_samples(padded);
    g.payload_range = IndexRange{500, 1524};
    const auto part = extract_features(g).values();
    for (std::size_t i = 0; i < whole.size(); ++i)
        CHECK(whole[i] == doctest::Approx(part[i]).epsilon(1e-12));
}

TEST_CASE("feature extraction errors")
{
    CHECK_THROWS_AS(extract_features(from_samples(cvec(255, 1.0))), Error);
    try {
        extract_features(from_samples(cvec(100, 1.0)));
        FAIL("short frame accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::frame_too_short);
    }
    try {
        extract_features(from_samples(cvec(512, 0.0)));
        FAIL("zero frame accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_input);
    }
}

TEST_CASE("training errors")
{
    std::vector<IqFrame> none;
    try {
        train_baseline(none);
        FAIL("empty set accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
    }

    std::vector<IqFrame> few;
    for (std::uint64_t i = 0; i < 19; ++i)
        few.push_back(from_samples(random_symbols(Scheme::BPSK, 512, i), Scheme::BPSK));
    try {
        train_baseline(few);
        FAIL("19 frames accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
    }
    few.push_back(from_samples(random_symbols(Scheme::BPSK, 512, 99), Scheme::BPSK));
    CHECK_NOTHROW(train_baseline(few));

    few.push_back(from_samples(random_symbols(Scheme::BPSK, 512, 100)));
    CHECK_THROWS_AS(train_baseline(few), Error);
    CHECK_THROWS_AS(classify(FeatureVector{}, BaselineModel{}), Error);
}

TEST_CASE("single-class model always predicts that class")
{
    std::vector<IqFrame> frames;
    for (std::uint64_t i = 0; i < 25; ++i)
        frames.push_back(from_samples(random_symbols(Scheme::QPSK, 512, 40 + i), Scheme::QPSK));
    const auto model = train_baseline(frames);
    REQUIRE(model.classes.size() == 1);
    CHECK(classify(from_samples(random_symbols(Scheme::QAM64, 512, 1)), model).scheme == Scheme::QPSK);
    CHECK(accuracy(frames, model) == 1.0);
}

TEST_CASE("training is deterministic and the model file round-trips")
{
    const auto g = digital_frames(280, 77, 20.0, {std::nullopt});
    const auto frames = labelled(g);
    const auto a = train_baseline(frames);
    const auto b = train_baseline(frames);
    REQUIRE(a.classes.size() == 7);
    for (std::size_t c = 0; c < 7; ++c) {
        CHECK(a.classes[c].label == b.classes[c].label);
        CHECK(a.classes[c].mean == b.classes[c].mean);
        CHECK(a.classes[c].covariance == b.classes[c].covariance);
    }

    const fs::path p = fs::temp_directory_path() / ("sigobf_model_" + std::to_string(::getpid()) + ".json");
    save_model(a, p);
    const auto l = load_model(p);
    REQUIRE(l.classes.size() == a.classes.size());
    for (std::size_t c = 0; c < 7; ++c) {
        CHECK(l.classes[c].label == a.classes[c].label);
        CHECK(l.classes[c].mean == a.classes[c].mean);
        CHECK(l.classes[c].covariance == a.classes[c].covariance);
    }
    for (const auto& f : frames)
        CHECK(classify(f, l).scores == classify(f, a).scores);

    {
        std::ofstream(p) << R"({"version": 99, "classes": []})";
    }
    try {
        load_model(p);
        FAIL("bad version accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::format_mismatch);
    }
    {
        std::ofstream(p) << "{not json";
    }
    CHECK_THROWS_AS(load_model(p), Error);
    fs::remove(p);
    try {
        load_model(p);
        FAIL("missing file accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io_failure);
    }
}

TEST_CASE("obfuscation degrades the baseline and equalization restores it")
{
    const obf::ObfuscationParams p{300e3, 100e3, 0.0};
    const auto train = labelled(digital_frames(700, 1001, 30.0, {std::nullopt}));
    const auto model = train_baseline(train);

    const auto test = digital_frames(700, 2002, 30.0, {std::nullopt, p});
    std::vector<IqFrame> clean, obf_raw, obf_eq;
    const auto raw = labelled(test);
    const auto eq = labelled(test, true);
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (test[i].record.obf) {
            obf_raw.push_back(raw[i]);
            obf_eq.push_back(eq[i]);
        } else {
            clean.push_back(raw[i]);
        }
    }
    const double a_clean = accuracy(clean, model);
    const double a_obf = accuracy(obf_raw, model);
    const double a_eq = accuracy(obf_eq, model);
    MESSAGE("clean " << a_clean << " obf " << a_obf << " equalized " << a_eq);
    CHECK(a_clean >= 0.8);
    CHECK(a_obf < a_clean - 0.2);
    CHECK(std::abs(a_eq - a_clean) <= 0.03);
}
