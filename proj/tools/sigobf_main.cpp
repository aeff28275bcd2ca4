#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigobf/channel.hpp"
#include "sigobf/error.hpp"
#include "sigobf/framegen.hpp"
#include "sigobf/harness.hpp"
#include "sigobf/modems.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/rng.hpp"
#include "sigobf/signal_core.hpp"

using namespace sigobf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string config_path;
    bool print_default = false;
};

// Sections present in the user file replace the default section whole;
// keys missing from a section fall back to that section's own defaults.
json load_config(const Globals& g)
{
    json cfg = harness::default_config();
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in)
            throw Error(ErrorKind::io_failure, "cannot open config " + g.config_path);
        json user;
        try {
            user = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::invalid_config, std::string("config is not valid JSON: ") + e.what());
        }
        if (!user.is_object())
            throw Error(ErrorKind::invalid_config, "config must be a JSON object");
        for (auto it = user.begin(); it != user.end(); ++it) {
            if (!cfg.contains(it.key()))
                throw Error(ErrorKind::invalid_config, "unknown config section '" + it.key() + "'");
            cfg[it.key()] = it.value();
        }
    }
    try {
        if (g.seed)
            cfg["seed"] = *g.seed;
        if (g.threads)
            cfg["threads"] = *g.threads;
        cfg["seed"].get<std::uint64_t>();
        cfg["threads"].get<unsigned>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("seed/threads: ") + e.what());
    }
    return cfg;
}

unsigned thread_count(const json& cfg)
{
    const auto t = cfg["threads"].get<unsigned>();
    return t ? t : std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t seed_of(const json& cfg)
{
    return cfg["seed"].get<std::uint64_t>();
}

template <typename Write>
void emit(const std::string& path, Write&& write)
{
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::io_failure, "cannot write " + path);
    write(out);
    if (!out)
        throw Error(ErrorKind::io_failure, "write failed for " + path);
}

// Summaries go to stderr when the result table itself goes to stdout.
std::ostream& log_stream(const std::string& out)
{
    return out == "-" ? std::cerr : std::cout;
}

// ---- gen-dataset ---------------------------------------------------------

struct GenOpts {
    std::string out;
    std::string profile;
    std::optional<std::size_t> scale;
};

int gen_dataset(const Globals& g, const GenOpts& o)
{
    const json cfg = load_config(g);
    json section = cfg["dataset"];
    if (!o.profile.empty() || o.scale) {
        // A profile switch starts from that profile's table, not the old counts.
        section = json{{"profile", o.profile.empty() ? section.value("profile", "dataset1") : o.profile}};
        if (o.scale)
            section["scale_divisor"] = *o.scale;
    }
    if (g.seed || !section.contains("master_seed"))
        section["master_seed"] = seed_of(cfg);
    framegen::DatasetConfig dc = framegen::dataset_config_from_json(section);
    dc.threads = thread_count(cfg);
    const auto m = framegen::generate_dataset(dc, o.out);

    std::map<std::string, std::size_t> per_split, per_class;
    for (const auto& r : m.frames) {
        ++per_split[std::string(framegen::to_string(r.split))];
        ++per_class[std::string(modem::name(r.label))];
    }
    std::cout << "wrote " << m.frames.size() << " frames (" << m.samples_per_frame << " samples each) to "
              << o.out << "\n  profile " << m.profile << ", master seed " << m.master_seed
              << ", config hash " << std::hex << harness::config_hash(framegen::to_json(dc)) << std::dec << "\n ";
    for (const char* s : {"train", "val", "test"})
        std::cout << ' ' << s << ' ' << per_split[s];
    std::cout << "\n ";
    for (const auto& [name, n] : per_class)
        std::cout << ' ' << name << ' ' << n;
    std::cout << '\n';
    return 0;
}

// ---- ser-sweep -----------------------------------------------------------

struct SerOpts {
    std::string out;
    std::string scheme;
    std::vector<double> snr;
    std::optional<double> delta_f, f_m;
    std::vector<std::string> modes;
    std::optional<std::size_t> symbols;
};

int ser_sweep(const Globals& g, const SerOpts& o)
{
    const json cfg = load_config(g);
    json section = cfg["ser_sweep"];
    if (!o.scheme.empty())
        section["scheme"] = o.scheme;
    if (!o.snr.empty())
        section["snr_grid"] = o.snr;
    if (o.delta_f)
        section["obf"]["delta_f"] = *o.delta_f;
    if (o.f_m)
        section["obf"]["f_m"] = *o.f_m;
    if (!o.modes.empty())
        section["modes"] = o.modes;
    if (o.symbols)
        section["symbols_per_point"] = *o.symbols;
    harness::SerSweepConfig sc = harness::ser_config_from_json(section);
    sc.seed = seed_of(cfg);
    sc.threads = thread_count(cfg);
    const auto hash = harness::config_hash(harness::to_json(sc));
    const auto rows = harness::run_ser_sweep(sc);
    emit(o.out, [&](std::ostream& s) { harness::write_ser_csv(s, rows, sc.seed, hash); });
    auto& log = log_stream(o.out);
    log << "ser-sweep " << modem::name(sc.scheme) << ": " << rows.size() << " rows, "
        << sc.symbols_per_point << " symbols per point\n";
    for (const auto& r : rows)
        log << "  " << r.snr_db << " dB " << harness::to_string(r.mode) << " SER " << r.ser << " +- " << r.ci95
            << '\n';
    return 0;
}

// ---- accuracy-sweep ------------------------------------------------------

struct AccOpts {
    std::string out;
    std::string dataset;
    std::string train_dataset;
    std::string model_mode;
    std::string model;
    std::optional<bool> equalize;
    bool all_schemes = false;
};

int accuracy_sweep(const Globals& g, const AccOpts& o)
{
    const json cfg = load_config(g);
    json section = cfg["accuracy_sweep"];
    if (!o.model_mode.empty())
        section["model_mode"] = o.model_mode;
    if (o.equalize)
        section["equalize"] = *o.equalize;
    if (o.all_schemes)
        section["digital_only"] = false;
    if (!o.model.empty())
        section["model"] = o.model;

    harness::AccuracySweepConfig ac;
    ac.dataset_dir = o.dataset;
    if (!o.train_dataset.empty())
        ac.train_dataset_dir = o.train_dataset;
    try {
        const std::string mode = section.value("model_mode", "baseline-train");
        if (mode == "baseline-train")
            ac.model_mode = harness::ModelMode::baseline_train;
        else if (mode == "baseline-eval")
            ac.model_mode = harness::ModelMode::baseline_eval;
        else
            throw Error(ErrorKind::invalid_config, "model_mode must be baseline-train or baseline-eval");
        ac.equalize = section.value("equalize", false);
        ac.digital_only = section.value("digital_only", true);
        if (section.contains("model"))
            ac.model_path = section["model"].get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("accuracy_sweep config: ") + e.what());
    }
    json effective = section;
    effective["dataset"] = o.dataset;
    if (ac.train_dataset_dir)
        effective["train_dataset"] = o.train_dataset;
    const auto rows = harness::run_accuracy_sweep(ac);
    emit(o.out, [&](std::ostream& s) {
        harness::write_accuracy_csv(s, rows, seed_of(cfg), harness::config_hash(effective));
    });
    auto& log = log_stream(o.out);
    log << "accuracy-sweep: " << rows.size() << " cells\n";
    for (const auto& r : rows)
        log << "  " << r.snr_db << " dB delta_f " << r.delta_f << " f_m " << r.f_m << ": " << r.accuracy << " (n="
            << r.n << ")\n";
    return 0;
}

// ---- spectrogram ---------------------------------------------------------

struct SpecOpts {
    std::string out;
    std::string dataset;
    std::optional<std::size_t> index;
    std::string scheme;
    std::optional<std::size_t> num_symbols;
    std::optional<double> delta_f, f_m;
    bool clean = false;
    std::optional<double> snr;
    std::optional<std::size_t> window_len, hop, fft_len;
};

IqFrame generated_frame(const json& section, std::uint64_t seed)
{
    const Scheme s = modem::scheme_from_name(section.value("scheme", "QPSK"));
    const std::size_t n = section.value("num_symbols", std::size_t{4096});
    if (n == 0)
        throw Error(ErrorKind::invalid_config, "num_symbols must be >= 1");
    const framegen::FrameFormat fmt;
    Rng rng(seed);
    IqFrame f;
    if (modem::is_analog(s)) {
        const std::size_t len = n * static_cast<std::size_t>(fmt.samples_per_symbol);
        const auto msg = modem::band_limited_message(
            len, 0.1 * fmt.sample_rate / fmt.samples_per_symbol, fmt.sample_rate, rng);
        f = modem::modulate_analog(msg, s);
    } else {
        const auto pulse = dsp::design_pulse(dsp::PulseKind::raised_cosine, fmt.rolloff, fmt.span_symbols,
                                             fmt.samples_per_symbol);
        const auto bits = modem::random_bits(n * static_cast<std::size_t>(modem::bits_per_symbol(s)), rng);
        f = modem::modulate_digital(bits, s, fmt.samples_per_symbol, pulse, fmt.sample_rate);
    }
    f = dsp::normalize_power(std::move(f));
    f.payload_range = IndexRange{0, f.size()};
    if (!section.value("clean", false)) {
        const json& p = section.at("obf");
        f = obf::apply(std::move(f), {p.at("delta_f").get<double>(), p.at("f_m").get<double>(), p.value("t0", 0.0)});
    }
    if (section.contains("snr_db") && !section["snr_db"].is_null())
        f = channel::awgn(std::move(f), section["snr_db"].get<double>(), derive_seed(seed, 1));
    return f;
}

int spectrogram(const Globals& g, const SpecOpts& o)
{
    const json cfg = load_config(g);
    json section = cfg["spectrogram"];
    if (!o.scheme.empty())
        section["scheme"] = o.scheme;
    if (o.num_symbols)
        section["num_symbols"] = *o.num_symbols;
    if (o.delta_f)
        section["obf"]["delta_f"] = *o.delta_f;
    if (o.f_m)
        section["obf"]["f_m"] = *o.f_m;
    if (o.clean)
        section["clean"] = true;
    if (o.snr)
        section["snr_db"] = *o.snr;
    if (o.window_len)
        section["window_len"] = *o.window_len;
    if (o.hop)
        section["hop"] = *o.hop;
    if (o.fft_len)
        section["fft_len"] = *o.fft_len;

    dsp::SpectrogramParams params;
    IqFrame frame;
    std::string source;
    try {
        params.window_len = section.value("window_len", params.window_len);
        params.hop = section.value("hop", params.hop);
        params.fft_len = section.value("fft_len", params.fft_len);
        const std::string w = section.value("window", "hann");
        if (w != "hann" && w != "rectangular")
            throw Error(ErrorKind::invalid_config, "window must be hann or rectangular");
        params.window = w == "hann" ? dsp::WindowKind::hann : dsp::WindowKind::rectangular;
        if (o.dataset.empty()) {
            frame = generated_frame(section, seed_of(cfg));
            source = "generated " + section.value("scheme", std::string("QPSK")) +
                     (section.value("clean", false) ? " (clean)" : " (obfuscated)");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("spectrogram config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_parameter)
            throw Error(ErrorKind::invalid_config, e.what());
        throw;
    }
    if (!o.dataset.empty()) {
        const auto data = framegen::load_dataset(o.dataset);
        const std::size_t i = o.index.value_or(0);
        if (i >= data.frames.size())
            throw Error(ErrorKind::invalid_parameter, "frame index " + std::to_string(i) + " out of range");
        frame = data.frames[i];
        source = o.dataset + " frame " + std::to_string(i);
    }
    const auto spec = dsp::spectrogram(frame, params);
    emit(o.out, [&](std::ostream& s) { harness::write_spectrogram(s, spec); });
    log_stream(o.out) << "spectrogram of " << source << ": " << spec.rows << " x " << spec.cols << '\n';
    return 0;
}

// ---- fading-sweep --------------------------------------------------------

struct FadeOpts {
    std::string out;
    std::string scheme;
    std::vector<std::size_t> taps;
    std::vector<double> snr;
    std::vector<std::string> modes;
    std::vector<std::string> equalizers;
    std::string model;
    std::optional<std::size_t> symbols, frames;
};

int fading_sweep(const Globals& g, const FadeOpts& o)
{
    const json cfg = load_config(g);
    json section = cfg["fading_sweep"];
    if (!o.scheme.empty())
        section["scheme"] = o.scheme;
    if (!o.taps.empty())
        section["tap_counts"] = o.taps;
    if (!o.snr.empty())
        section["snr_grid"] = o.snr;
    if (!o.modes.empty())
        section["modes"] = o.modes;
    if (!o.equalizers.empty())
        section["equalizers"] = o.equalizers;
    if (o.symbols)
        section["symbols_per_point"] = *o.symbols;
    if (o.frames)
        section["frames_per_point"] = *o.frames;
    harness::FadingSweepConfig fc = harness::fading_config_from_json(section);
    if (!o.model.empty())
        fc.model_path = o.model;
    else if (section.contains("model"))
        fc.model_path = section["model"].get<std::string>();
    fc.seed = seed_of(cfg);
    fc.threads = thread_count(cfg);
    json effective = harness::to_json(fc);
    if (fc.model_path)
        effective["model"] = fc.model_path->string();
    const auto rows = harness::run_fading_sweep(fc);
    emit(o.out, [&](std::ostream& s) { harness::write_fading_csv(s, rows, fc.seed, harness::config_hash(effective)); });
    auto& log = log_stream(o.out);
    log << "fading-sweep " << modem::name(fc.scheme) << ": " << rows.size() << " rows\n";
    for (const auto& r : rows) {
        log << "  taps " << r.num_taps << ' ' << r.snr_db << " dB " << harness::to_string(r.mode) << ' '
            << harness::to_string(r.equalizer) << " SER " << r.ser;
        if (r.accuracy)
            log << " accuracy " << *r.accuracy;
        log << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Waveform obfuscation modem toolkit"};
    app.require_subcommand(0, 1);
    Globals g;
    app.add_option("--seed", g.seed, "Master seed for every random stream");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_flag("--print-default-config", g.print_default, "Print the default configuration and exit");

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-dataset", "Generate a dataset (frames.bin + manifest.json)");
    gen_cmd->add_option("--out,-o", gen.out, "Output directory")->required();
    gen_cmd->add_option("--profile", gen.profile, "dataset1 or dataset2");
    gen_cmd->add_option("--scale", gen.scale, "Divide the profile's frame counts by this");

    SerOpts ser;
    auto* ser_cmd = app.add_subcommand("ser-sweep", "Symbol error rate over an SNR grid");
    ser_cmd->add_option("--out,-o", ser.out, "Output CSV ('-' for stdout)")->required();
    ser_cmd->add_option("--scheme", ser.scheme, "Digital scheme");
    ser_cmd->add_option("--snr", ser.snr, "Es/N0 grid in dB");
    ser_cmd->add_option("--delta-f", ser.delta_f, "Obfuscation frequency deviation, Hz");
    ser_cmd->add_option("--f-m", ser.f_m, "Obfuscation modulating frequency, Hz");
    ser_cmd->add_option("--modes", ser.modes, "Any of clean, obf_no_eq, obf_eq");
    ser_cmd->add_option("--symbols", ser.symbols, "Symbols per point");

    AccOpts acc;
    auto* acc_cmd = app.add_subcommand("accuracy-sweep", "Baseline classifier accuracy over a dataset's test split");
    acc_cmd->add_option("--dataset", acc.dataset, "Dataset directory")->required();
    acc_cmd->add_option("--train-dataset", acc.train_dataset, "Training dataset (default: --dataset)");
    acc_cmd->add_option("--model-mode", acc.model_mode, "baseline-train or baseline-eval");
    acc_cmd->add_option("--model", acc.model, "Model file, written when training, read when evaluating");
    acc_cmd->add_option("--equalize", acc.equalize, "Remove the recorded obfuscation before classifying");
    acc_cmd->add_flag("--all-schemes", acc.all_schemes, "Include analog schemes");
    acc_cmd->add_option("--out,-o", acc.out, "Output CSV ('-' for stdout)")->required();

    SpecOpts sp;
    auto* sp_cmd = app.add_subcommand("spectrogram", "Magnitude spectrogram grid of one frame");
    sp_cmd->add_option("--out,-o", sp.out, "Output grid file ('-' for stdout)")->required();
    sp_cmd->add_option("--dataset", sp.dataset, "Take the frame from this dataset");
    sp_cmd->add_option("--index", sp.index, "Frame index within --dataset");
    sp_cmd->add_option("--scheme", sp.scheme, "Scheme of a generated frame");
    sp_cmd->add_option("--num-symbols", sp.num_symbols, "Length of a generated frame in symbols");
    sp_cmd->add_option("--delta-f", sp.delta_f, "Obfuscation frequency deviation, Hz");
    sp_cmd->add_option("--f-m", sp.f_m, "Obfuscation modulating frequency, Hz");
    sp_cmd->add_flag("--clean", sp.clean, "Do not obfuscate the generated frame");
    sp_cmd->add_option("--snr", sp.snr, "Add AWGN at this SNR, dB");
    sp_cmd->add_option("--window-len", sp.window_len);
    sp_cmd->add_option("--hop", sp.hop);
    sp_cmd->add_option("--fft-len", sp.fft_len);

    FadeOpts fd;
    auto* fd_cmd = app.add_subcommand("fading-sweep", "SER and accuracy under Rayleigh multipath");
    fd_cmd->add_option("--out,-o", fd.out, "Output CSV ('-' for stdout)")->required();
    fd_cmd->add_option("--scheme", fd.scheme, "Digital scheme for the SER runs");
    fd_cmd->add_option("--taps", fd.taps, "Tap counts");
    fd_cmd->add_option("--snr", fd.snr, "Es/N0 grid in dB");
    fd_cmd->add_option("--modes", fd.modes, "Any of clean, obf_no_eq, obf_eq");
    fd_cmd->add_option("--equalizers", fd.equalizers, "Any of mlsd, mmse, matched");
    fd_cmd->add_option("--model", fd.model, "Baseline model file; adds accuracy columns");
    fd_cmd->add_option("--symbols", fd.symbols, "Symbols per point");
    fd_cmd->add_option("--frames", fd.frames, "Classified frames per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::invalid_config);
    }

    try {
        if (g.print_default) {
            std::cout << harness::default_config().dump(2) << '\n';
            return 0;
        }
        if (gen_cmd->parsed())
            return gen_dataset(g, gen);
        if (ser_cmd->parsed())
            return ser_sweep(g, ser);
        if (acc_cmd->parsed())
            return accuracy_sweep(g, acc);
        if (sp_cmd->parsed())
            return spectrogram(g, sp);
        if (fd_cmd->parsed())
            return fading_sweep(g, fd);
        std::cerr << app.help();
        return exit_code(ErrorKind::invalid_config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
