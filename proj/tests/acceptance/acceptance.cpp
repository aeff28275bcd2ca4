// Acceptance suite P1-P10. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "sigobf/baseline.hpp"
#include "sigobf/channel.hpp"
#include "sigobf/framegen.hpp"
#include "sigobf/harness.hpp"
#include "sigobf/modems.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/ofdm.hpp"
#include "sigobf/rng.hpp"

using namespace sigobf;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Random obfuscation pair over a wide range, t0 included.
obf::ObfuscationParams random_params(Rng& r)
{
    return {1.0 + 1e6 * r.uniform(), 1.0 + 5e5 * r.uniform(), 1e-3 * r.uniform()};
}

Outcome p1_power_invariance()
{
    Rng r(101);
    IqFrame x;
    x.sample_rate = 40e6;
    x.samples.resize(1'000'000);
    for (auto& v : x.samples)
        v = r.complex_gaussian(1.0);
    x.payload_range = IndexRange{0, x.size()};
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const IqFrame y = obf::apply(x, random_params(r));
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double p = std::norm(x.samples[i]);
            worst = std::max(worst, std::abs(std::norm(y.samples[i]) - p) / p);
        }
    }
    return {worst < 1e-12, "max relative power deviation " + fmt("%.3g", worst)};
}

Outcome p2_lossless_removal()
{
    Rng r(202);
    std::vector<framegen::FrameSpec> specs;
    const Scheme ofdm_schemes[] = {Scheme::BPSK, Scheme::QPSK, Scheme::PSK8, Scheme::QAM16, Scheme::QAM64};
    std::size_t n_ofdm = 0, n_analog = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        framegen::FrameSpec s;
        s.seed = derive_seed(202, i);
        if (i % 3 == 2) {
            s.scheme = ofdm_schemes[(i / 3) % 5];
            s.ofdm = ofdm::OfdmConfig::dataset_default();
            ++n_ofdm;
        } else {
            s.scheme = modem::all_schemes[i % std::size(modem::all_schemes)];
            n_analog += modem::is_analog(s.scheme);
        }
        specs.push_back(s);
    }
    double worst = 0.0;
    for (const auto& s : specs) {
        const IqFrame x = framegen::build_frame(s);
        const auto p = random_params(r);
        const IqFrame y = obf::remove(obf::apply(x, p), p);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = std::abs(y.samples[i] - x.samples[i]);
            if (d > 0.0)
                worst = std::max(worst, d / std::abs(x.samples[i]));
        }
    }
    return {worst < 1e-10, "1000 frames (" + std::to_string(n_analog) + " analog, " + std::to_string(n_ofdm) +
                               " OFDM), max relative error " + fmt("%.3g", worst)};
}

Outcome p3_theoretical_ser()
{
    bool ok = true;
    std::ostringstream d;
    for (double db : {0.0, 4.0, 8.0}) {
        harness::LinkSetup s;
        s.scheme = Scheme::QPSK;
        s.es_n0_db = db;
        s.num_symbols = 100000;
        s.seed = derive_seed(303, static_cast<std::uint64_t>(db));
        const auto res = harness::simulate_link(s);
        const double p = oracle::qpsk_ser(std::pow(10.0, db / 10.0));
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(res.symbols));
        const double z = (res.ser() - p) / sigma;
        ok = ok && std::abs(z) <= 3.0;
        d << db << " dB: " << res.ser() << " vs " << p << " (" << fmt("%+.2f", z) << " sd); ";
    }
    return {ok, d.str()};
}

Outcome p4_no_performance_loss()
{
    harness::LinkSetup s;
    s.scheme = Scheme::QPSK;
    s.es_n0_db = 10.0;
    s.num_symbols = 100000;
    s.seed = 404;
    s.keep_error_flags = true;
    const obf::ObfuscationParams p{300e3, 100e3, 0.0};
    const auto clean = harness::simulate_link(harness::with_mode(s, harness::LinkMode::clean, p));
    const auto eq = harness::simulate_link(harness::with_mode(s, harness::LinkMode::obf_eq, p));
    // McNemar on the discordant pairs.
    double b = 0, c = 0;
    for (std::size_t i = 0; i < clean.error_flags.size(); ++i) {
        b += clean.error_flags[i] && !eq.error_flags[i];
        c += !clean.error_flags[i] && eq.error_flags[i];
    }
    const double chi2 = b + c > 0 ? (b - c) * (b - c) / (b + c) : 0.0;
    const bool test_ok = chi2 < 6.635;

    Rng r(405);
    IqFrame n;
    n.sample_rate = 40e6;
    n.samples.resize(100000);
    for (auto& v : n.samples)
        v = r.complex_gaussian(1.0);
    n.payload_range = IndexRange{0, n.size()};
    const IqFrame m = obf::remove(n, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(m.samples[i]) - std::abs(n.samples[i])));
    const bool mod_ok = worst <= 1e-12;

    std::ostringstream d;
    d << "SER clean " << clean.ser() << " obf_eq " << eq.ser() << ", discordant " << b << "/" << c << ", chi2 "
      << fmt("%.3f", chi2) << " (crit 6.635); noise modulus max diff " << fmt("%.3g", worst);
    return {test_ok && mod_ok, d.str()};
}

Outcome p5_degradation()
{
    harness::LinkSetup s;
    s.scheme = Scheme::QPSK;
    s.es_n0_db = 10.0;
    s.num_symbols = 100000;
    s.seed = 505;
    const obf::ObfuscationParams p{300e3, 100e3, 0.0};
    const auto clean = harness::simulate_link(harness::with_mode(s, harness::LinkMode::clean, p));
    const auto no_eq = harness::simulate_link(harness::with_mode(s, harness::LinkMode::obf_no_eq, p));
    const bool ok = no_eq.ser() - no_eq.ci95() > clean.ser() + clean.ci95();
    std::ostringstream d;
    d << "delta_f 300 kHz, f_m 100 kHz: obf_no_eq " << no_eq.ser() << " +- " << no_eq.ci95() << " vs clean "
      << clean.ser() << " +- " << clean.ci95();
    return {ok, d.str()};
}

Outcome p6_ofdm()
{
    ofdm::OfdmConfig cfg;
    cfg.num_subcarriers = 64;
    cfg.cp_len = 16;
    Rng r(606);
    double worst = 0.0;
    std::size_t erased = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t nsym = 8;
        cvec x(nsym * 64);
        for (auto& v : x)
            v = cplx(r.bit() ? 1.0 : -1.0, r.bit() ? 1.0 : -1.0) / std::sqrt(2.0);
        // Two taps; the second at a random delay inside the CP.
        const std::size_t delay = 1 + r.below(cfg.cp_len - 1);
        cvec taps(delay + 1, 0.0);
        taps[0] = std::polar(1.0, 2 * pi * r.uniform());
        taps[delay] = std::polar(0.9 * r.uniform(), 2 * pi * r.uniform());
        const IqFrame tx = ofdm::ofdm_modulate(x, cfg);
        const IqFrame rx = channel::multipath(tx, taps);
        const auto h = ofdm::channel_frequency_response(taps, 64);
        const auto blocks = ofdm::ofdm_demodulate(rx, cfg);
        for (std::size_t b = 0; b < nsym; ++b) {
            const auto eq = ofdm::ofdm_equalize(blocks[b], h);
            erased += eq.num_erased();
            for (std::size_t k = 0; k < 64; ++k)
                worst = std::max(worst, std::abs(eq.symbols[k] - x[b * 64 + k]));
        }
    }
    return {worst < 1e-9 && erased == 0,
            "N=64 CP=16, 100 channels x 8 symbols, max |X_hat - X| " + fmt("%.3g", worst)};
}

Outcome p7_instantaneous_frequency()
{
    struct Case {
        double df, fm, fs;
    };
    const Case cases[] = {{300e3, 100e3, 40e6}, {100.0, 100.0, 1e6}, {75.0, 25.0, 1e5}, {1e6, 20e3, 40e6}};
    bool ok = true;
    std::ostringstream d;
    for (const Case& c : cases) {
        const obf::ObfuscationParams p{c.df, c.fm, 0.0};
        const auto n = static_cast<std::size_t>(std::ceil(c.fs / c.fm)) + 1;
        const cvec w = obf::obf_waveform(p, n + 1, c.fs);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            const double f_est = std::arg(w[i + 1] * std::conj(w[i])) * c.fs / (2 * pi);
            const double t = (static_cast<double>(i) + 0.5) / c.fs;
            worst = std::max(worst, std::abs(f_est - c.df * std::cos(2 * pi * c.fm * t)));
        }
        const double bound = 2 * pi * c.fm * c.fm / c.fs;
        ok = ok && worst < bound;
        d << fmt("%g", c.df) << "/" << fmt("%g", c.fm) << ": " << fmt("%.3g", worst) << " < " << fmt("%.3g", bound)
          << "; ";
    }
    return {ok, d.str()};
}

Outcome p8_mlsd_oracle()
{
    Rng r(808);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Scheme s = trial % 2 ? Scheme::QPSK : Scheme::BPSK;
        const auto& c = modem::constellation(s);
        const std::size_t n = 1 + r.below(s == Scheme::BPSK ? 12 : 10);
        cvec taps{r.complex_gaussian(1.0)};
        if (trial % 4 >= 2)
            taps.push_back(r.complex_gaussian(0.7));
        cvec sym(n);
        for (auto& v : sym)
            v = c.points[r.below(c.size())];
        cvec obs = oracle::direct_convolve(sym, std::vector<cplx>(taps.begin(), taps.end()));
        obs.resize(n);
        for (auto& v : obs)
            v += r.complex_gaussian(0.5);
        const auto got = channel::mlsd_detect(obs, taps, c);
        const auto idx = oracle::brute_force_ml(obs, taps, c.points);
        for (std::size_t i = 0; i < n; ++i)
            if (got[i] != c.decide(c.points[idx[i]])) {
                ++mismatches;
                break;
            }
    }
    return {mismatches == 0, "200 instances (QPSK up to 10 symbols, BPSK up to 12), " +
                                 std::to_string(mismatches) + " mismatches"};
}

// Upper tail P(X >= k) of Binomial(n, 1/2).
double binom_upper_tail(std::size_t k, std::size_t n)
{
    double sum = 0.0;
    for (std::size_t i = k; i <= n; ++i)
        sum += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
    return std::min(1.0, sum);
}

Outcome p9_baseline_direction()
{
    auto clean_cfg = framegen::DatasetConfig::dataset1(100);
    clean_cfg.snr_grid = {30};
    clean_cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    auto obf_cfg = clean_cfg;
    obf_cfg.obf_pairs = {obf::ObfuscationParams{300e3, 100e3, 0.0}};
    const auto clean = framegen::generate_frames(clean_cfg, 0, clean_cfg.total());
    const auto obfd = framegen::generate_frames(obf_cfg, 0, obf_cfg.total());

    std::vector<IqFrame> train;
    for (const auto& g : clean)
        if (g.record.split == framegen::Split::train && modem::is_digital(g.record.label)) {
            train.push_back(g.samples);
            train.back().label = g.record.label;
        }
    const auto model = baseline::train_baseline(train);

    std::size_t n = 0, ok_clean = 0, ok_obf = 0, ok_eq = 0, b = 0, c = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto& rec = clean[i].record;
        if (rec.split != framegen::Split::test || !modem::is_digital(rec.label))
            continue;
        ++n;
        const bool a1 = baseline::classify(clean[i].samples, model).scheme == rec.label;
        const bool a2 = baseline::classify(obfd[i].samples, model).scheme == rec.label;
        IqFrame e = obfd[i].samples;
        e.payload_range = IndexRange{0, e.size()};
        e = obf::remove(std::move(e), *obfd[i].record.obf);
        const bool a3 = baseline::classify(e, model).scheme == rec.label;
        ok_clean += a1;
        ok_obf += a2;
        ok_eq += a3;
        b += a1 && !a2;
        c += !a1 && a2;
    }
    const double acc_clean = static_cast<double>(ok_clean) / static_cast<double>(n);
    const double acc_obf = static_cast<double>(ok_obf) / static_cast<double>(n);
    const double acc_eq = static_cast<double>(ok_eq) / static_cast<double>(n);
    // One-sided exact sign test on the paired discordant frames.
    const double pval = binom_upper_tail(b, b + c);
    const bool ok = acc_clean >= 0.8 && pval < 0.01 && std::abs(acc_eq - acc_clean) <= 0.03;
    std::ostringstream d;
    d << n << " digital test frames at 30 dB: clean " << fmt("%.3f", acc_clean) << ", obfuscated "
      << fmt("%.3f", acc_obf) << " (p=" << fmt("%.2g", pval) << "), equalized " << fmt("%.3f", acc_eq);
    return {ok, d.str()};
}

// Minimal reader written against the documented format only: manifest keys
// plus little-endian float32 I,Q pairs.
std::vector<float> parse_record(const fs::path& dir, std::size_t index)
{
    std::ifstream mf(dir / "manifest.json");
    const auto m = nlohmann::json::parse(mf);
    const auto& fr = m.at("frames").at(index);
    const std::uint64_t offset = fr.at("file_offset").get<std::uint64_t>();
    const std::size_t count = 2 * m.at("samples_per_frame").get<std::size_t>();
    std::ifstream in(dir / m.at("data_file").get<std::string>(), std::ios::binary);
    in.seekg(static_cast<std::streamoff>(offset));
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in)
        throw std::runtime_error("short read");
    std::vector<float> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t u = raw[4 * i] | (raw[4 * i + 1] << 8) | (raw[4 * i + 2] << 16) |
                                (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

Outcome p10_dataset_determinism()
{
    const fs::path root = fs::temp_directory_path() / ("sigobf_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    bool ok = true;
    std::size_t checked = 0;
    std::string why;
    for (const bool second : {false, true}) {
        auto cfg = second ? framegen::DatasetConfig::dataset2(100) : framegen::DatasetConfig::dataset1(100);
        const fs::path a = root / (cfg.profile + "_a"), b = root / (cfg.profile + "_b");
        cfg.threads = 4;
        framegen::generate_dataset(cfg, a);
        cfg.threads = 1;
        framegen::generate_dataset(cfg, b);
        for (const char* f : {"frames.bin", "manifest.json"})
            if (oracle::read_bytes((a / f).string()) != oracle::read_bytes((b / f).string())) {
                ok = false;
                why += cfg.profile + "/" + f + " differs; ";
            }
        const auto mem = framegen::generate_frames(cfg, 0, cfg.total());
        for (std::size_t i = 0; i < mem.size(); ++i) {
            const auto parsed = parse_record(a, i);
            const cvec& s = mem[i].samples.samples;
            for (std::size_t k = 0; k < s.size(); ++k) {
                const float re = static_cast<float>(s[k].real());
                const float im = static_cast<float>(s[k].imag());
                if (std::bit_cast<std::uint32_t>(re) != std::bit_cast<std::uint32_t>(parsed[2 * k]) ||
                    std::bit_cast<std::uint32_t>(im) != std::bit_cast<std::uint32_t>(parsed[2 * k + 1])) {
                    ok = false;
                    why += cfg.profile + " frame " + std::to_string(i) + " mismatch; ";
                    break;
                }
            }
            ++checked;
        }
    }
    fs::remove_all(root);
    return {ok, std::to_string(checked) + " frames (dataset1 and dataset2 at 1/100 scale) byte-identical and parsed "
                                          "bit-exactly" + (why.empty() ? "" : ": " + why)};
}

struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s; // 0 = none
};

} // namespace

int main()
{
    const Criterion all[] = {
        {"P1", "power invariance", p1_power_invariance, 10.0},
        {"P2", "lossless removal", p2_lossless_removal, 10.0},
        {"P3", "theoretical QPSK SER", p3_theoretical_ser, 60.0},
        {"P4", "no loss with removal", p4_no_performance_loss, 0.0},
        {"P5", "degradation without removal", p5_degradation, 0.0},
        {"P6", "OFDM round trip", p6_ofdm, 0.0},
        {"P7", "instantaneous frequency", p7_instantaneous_frequency, 0.0},
        {"P8", "MLSD vs exhaustive ML", p8_mlsd_oracle, 0.0},
        {"P9", "baseline classifier direction", p9_baseline_direction, 0.0},
        {"P10", "dataset determinism and format", p10_dataset_determinism, 0.0},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += " [over " + fmt("%g", c.time_limit_s) + " s limit]";
        }
        failed += !o.pass;
        std::printf("%-3s %-31s %s (%.2f s)  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(all)) - failed, std::size(all));
    return failed ? 1 : 0;
}
