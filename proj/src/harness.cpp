#include "sigobf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

#include "parallel.hpp"
#include "sigobf/error.hpp"
#include "sigobf/modems.hpp"
#include "sigobf/rng.hpp"

namespace sigobf::harness {
using nlohmann::json;

namespace {

constexpr std::uint64_t noise_stream = 1;
constexpr std::uint64_t fading_stream = 2;

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_header(std::ostream& out, std::uint64_t seed, std::uint64_t hash)
{
    out << "# seed=" << seed << " config_hash=" << hex(hash) << '\n';
}

json obf_json(const obf::ObfuscationParams& p)
{
    return {{"delta_f", p.delta_f}, {"f_m", p.f_m}, {"t0", p.t0}};
}

obf::ObfuscationParams obf_from(const json& j, obf::ObfuscationParams base)
{
    base.delta_f = j.value("delta_f", base.delta_f);
    base.f_m = j.value("f_m", base.f_m);
    base.t0 = j.value("t0", base.t0);
    return base;
}

std::vector<LinkMode> modes_from(const json& j)
{
    std::vector<LinkMode> out;
    for (const auto& m : j)
        out.push_back(link_mode_from_string(m.get<std::string>()));
    return out;
}

json modes_json(const std::vector<LinkMode>& modes)
{
    json out = json::array();
    for (LinkMode m : modes)
        out.push_back(to_string(m));
    return out;
}

// Rayleigh taps whose expected total power is 1. Unlike per-draw
// normalization this keeps the fading of the received power.
cvec fading_taps(std::size_t num_taps, double decay_db_per_tap, std::uint64_t seed)
{
    cvec taps = channel::rayleigh_taps(num_taps, decay_db_per_tap, seed, false);
    double profile = 0.0;
    for (std::size_t i = 0; i < num_taps; ++i)
        profile += std::pow(10.0, -decay_db_per_tap * static_cast<double>(i) / 10.0);
    for (cplx& t : taps)
        t /= std::sqrt(profile);
    return taps;
}

struct FrameResult {
    std::size_t symbols = 0;
    std::size_t errors = 0;
    bool fell_back = false;
    std::vector<std::uint8_t> flags;
};

FrameResult run_frame(const LinkSetup& s, const dsp::PulseShape& pulse, std::size_t frame_index, std::size_t count)
{
    const std::uint64_t fseed = derive_seed(s.seed, frame_index);
    Rng rng(fseed);
    const auto sps = static_cast<std::size_t>(s.samples_per_symbol);
    const bool gfsk = s.scheme == Scheme::GFSK;

    modem::Bits bits;
    modem::Labels labels;
    IqFrame tx;
    if (gfsk) {
        bits = modem::random_bits(count, rng);
        tx = modem::modulate_gfsk(bits, s.samples_per_symbol, s.sample_rate);
    } else {
        const auto& c = modem::constellation(s.scheme);
        labels.resize(count);
        for (auto& l : labels)
            l = static_cast<unsigned>(rng.below(c.size()));
        tx = modem::shape_symbols(modem::map_labels(labels, s.scheme), pulse, s.sample_rate);
    }

    cvec taps{1.0};
    std::size_t spacing = sps;
    switch (s.fading) {
    case Fading::none: break;
    case Fading::flat_rayleigh: taps = fading_taps(1, 0.0, derive_seed(fseed, fading_stream)); break;
    case Fading::multipath_rayleigh:
        taps = fading_taps(s.num_taps, s.decay_db_per_tap, derive_seed(fseed, fading_stream));
        break;
    case Fading::fixed_taps: taps = s.fixed_taps; break;
    }
    if (taps.size() > 1)
        tx.samples.resize(tx.size() + (taps.size() - 1) * spacing);
    tx.payload_range = IndexRange{0, tx.size()};

    if (s.tx_obf)
        tx = obf::apply(std::move(tx), *s.tx_obf);
    IqFrame rx = taps.size() > 1 ? channel::multipath(std::move(tx), taps, spacing) : channel::flat_fade(std::move(tx), taps[0]);

    // Expected channel power gain: 1 for the Rayleigh cases, so Es/N0 is the
    // average SNR.
    double gain = 1.0;
    if (s.fading == Fading::fixed_taps) {
        gain = 0.0;
        for (const cplx& t : taps)
            gain += std::norm(t);
    }
    const double es_n0 = std::pow(10.0, s.es_n0_db / 10.0);
    if (std::isfinite(es_n0))
        rx = channel::add_noise(std::move(rx), static_cast<double>(sps) * gain / es_n0, derive_seed(fseed, noise_stream));
    if (s.rx_obf)
        rx = obf::remove(std::move(rx), *s.rx_obf);

    FrameResult r;
    r.symbols = count;
    if (s.keep_error_flags)
        r.flags.resize(count);
    if (gfsk) {
        const auto got = modem::demod_gfsk(rx, count, s.samples_per_symbol);
        for (std::size_t k = 0; k < count; ++k) {
            const bool e = got[k] != bits[k];
            r.errors += e;
            if (s.keep_error_flags)
                r.flags[k] = e;
        }
        return r;
    }

    const auto& c = modem::constellation(s.scheme);
    modem::Labels got;
    Equalizer eq = s.equalizer;
    if (eq == Equalizer::mlsd && taps.size() > 1) {
        const double states = std::pow(static_cast<double>(c.size()), static_cast<double>(taps.size() - 1));
        if (states > static_cast<double>(channel::mlsd_max_states)) {
            eq = Equalizer::mmse;
            r.fell_back = true;
        }
    }
    if (eq == Equalizer::mlsd) {
        got = channel::mlsd_equalize(rx, taps, s.scheme, pulse);
    } else {
        cvec y = modem::matched_filter_symbols(rx.samples, pulse);
        if (eq == Equalizer::mmse) {
            IqFrame obs;
            obs.samples = std::move(y);
            obs.sample_rate = s.sample_rate / static_cast<double>(sps);
            y = channel::mmse_equalize(obs, taps, gain / es_n0).samples;
        } else {
            for (cplx& v : y)
                v /= taps[0];
        }
        got.resize(y.size());
        for (std::size_t k = 0; k < y.size(); ++k)
            got[k] = c.decide(y[k]);
    }
    if (got.size() < count)
        throw Error(ErrorKind::invalid_length, "receiver produced too few symbols");
    for (std::size_t k = 0; k < count; ++k) {
        const bool e = got[k] != labels[k];
        r.errors += e;
        if (s.keep_error_flags)
            r.flags[k] = e;
    }
    return r;
}

} // namespace

std::string_view to_string(LinkMode m) noexcept
{
    switch (m) {
    case LinkMode::clean: return "clean";
    case LinkMode::obf_no_eq: return "obf_no_eq";
    case LinkMode::obf_eq: return "obf_eq";
    }
    return "clean";
}

LinkMode link_mode_from_string(std::string_view text)
{
    if (text == "clean") return LinkMode::clean;
    if (text == "obf_no_eq") return LinkMode::obf_no_eq;
    if (text == "obf_eq") return LinkMode::obf_eq;
    throw Error(ErrorKind::invalid_config, "unknown link mode '" + std::string(text) + "'");
}

std::string_view to_string(Equalizer e) noexcept
{
    switch (e) {
    case Equalizer::matched: return "matched";
    case Equalizer::mlsd: return "mlsd";
    case Equalizer::mmse: return "mmse";
    }
    return "matched";
}

Equalizer equalizer_from_string(std::string_view text)
{
    if (text == "matched") return Equalizer::matched;
    if (text == "mlsd") return Equalizer::mlsd;
    if (text == "mmse") return Equalizer::mmse;
    throw Error(ErrorKind::invalid_config, "unknown equalizer '" + std::string(text) + "'");
}

double LinkResult::ci95() const noexcept
{
    if (symbols == 0)
        return 0.0;
    const double p = ser();
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(symbols));
}

LinkResult simulate_link(const LinkSetup& s)
{
    if (modem::is_analog(s.scheme))
        throw Error(ErrorKind::unsupported_scheme, std::string(modem::name(s.scheme)) + " has no symbol decisions");
    if (s.samples_per_symbol < 2 || s.span_symbols < 1 || s.symbols_per_frame == 0 || s.num_symbols == 0 ||
        std::isnan(s.es_n0_db))
        throw Error(ErrorKind::invalid_parameter, "invalid link setup");
    if (s.fading == Fading::fixed_taps && s.fixed_taps.empty())
        throw Error(ErrorKind::invalid_parameter, "fixed_taps fading needs taps");
    if (s.fading == Fading::multipath_rayleigh && s.num_taps == 0)
        throw Error(ErrorKind::invalid_parameter, "num_taps must be >= 1");
    if (s.tx_obf)
        s.tx_obf->validate();
    if (s.rx_obf)
        s.rx_obf->validate();

    const auto pulse =
        dsp::design_pulse(dsp::PulseKind::root_raised_cosine, s.rolloff, s.span_symbols, s.samples_per_symbol);
    LinkResult out;
    out.equalizer_used = s.equalizer;
    for (std::size_t f = 0, done = 0; done < s.num_symbols; ++f) {
        const std::size_t count = std::min(s.symbols_per_frame, s.num_symbols - done);
        FrameResult r = run_frame(s, pulse, f, count);
        out.symbols += r.symbols;
        out.errors += r.errors;
        if (r.fell_back)
            out.equalizer_used = Equalizer::mmse;
        if (s.keep_error_flags)
            out.error_flags.insert(out.error_flags.end(), r.flags.begin(), r.flags.end());
        done += count;
    }
    return out;
}

LinkSetup with_mode(LinkSetup setup, LinkMode mode, const obf::ObfuscationParams& params)
{
    setup.tx_obf.reset();
    setup.rx_obf.reset();
    if (mode != LinkMode::clean)
        setup.tx_obf = params;
    if (mode == LinkMode::obf_eq)
        setup.rx_obf = params;
    return setup;
}

std::vector<SerRow> run_ser_sweep(const SerSweepConfig& config)
{
    if (config.snr_grid.empty() || config.modes.empty())
        throw Error(ErrorKind::invalid_config, "ser sweep needs an SNR grid and modes");
    config.obf.validate();
    const std::size_t nm = config.modes.size();
    std::vector<SerRow> rows(config.snr_grid.size() * nm);
    detail::parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        LinkSetup s;
        s.scheme = config.scheme;
        s.es_n0_db = config.snr_grid[i / nm];
        s.num_symbols = config.symbols_per_point;
        s.seed = derive_seed(config.seed, i / nm);
        s = with_mode(s, config.modes[i % nm], config.obf);
        const LinkResult r = simulate_link(s);
        rows[i] = {s.es_n0_db, config.modes[i % nm], r.symbols, r.errors, r.ser(), r.ci95()};
    });
    return rows;
}

std::vector<AccuracyRow> accuracy_table(std::span<const framegen::FrameRecord> records, std::span<const IqFrame> frames,
                                        const baseline::BaselineModel& model, bool equalize)
{
    if (records.size() != frames.size())
        throw Error(ErrorKind::invalid_parameter, "records and frames differ in length");
    std::map<std::tuple<double, double, double>, std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        IqFrame f = frames[i];
        f.label = rec.label;
        if (equalize && rec.obf) {
            f.payload_range = IndexRange{0, f.size()};
            f = obf::remove(std::move(f), *rec.obf);
        }
        const double df = rec.obf ? rec.obf->delta_f : 0.0;
        const double fm = rec.obf ? rec.obf->f_m : 0.0;
        auto& cell = cells[{rec.snr_db, df, fm}];
        cell.first += baseline::classify(f, model).scheme == rec.label;
        ++cell.second;
    }
    std::vector<AccuracyRow> out;
    for (const auto& [key, cell] : cells)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                       static_cast<double>(cell.first) / static_cast<double>(cell.second), cell.second});
    return out;
}

std::vector<AccuracyRow> run_accuracy_sweep(const AccuracySweepConfig& config)
{
    auto keep = [&](Scheme s) { return !config.digital_only || modem::is_digital(s); };
    const framegen::Dataset data = framegen::load_dataset(config.dataset_dir);

    baseline::BaselineModel model;
    if (config.model_mode == ModelMode::baseline_eval) {
        if (!config.model_path)
            throw Error(ErrorKind::invalid_config, "baseline-eval needs a model path");
        model = baseline::load_model(*config.model_path);
    } else {
        const framegen::Dataset train_data = config.train_dataset_dir
                                                 ? framegen::load_dataset(*config.train_dataset_dir)
                                                 : data;
        std::vector<IqFrame> train;
        for (std::size_t i = 0; i < train_data.frames.size(); ++i) {
            const auto& rec = train_data.manifest.frames[i];
            if (rec.split == framegen::Split::train && keep(rec.label))
                train.push_back(train_data.frames[i]);
        }
        model = baseline::train_baseline(train);
        if (config.model_path)
            baseline::save_model(model, *config.model_path);
    }

    std::vector<framegen::FrameRecord> records;
    std::vector<IqFrame> frames;
    for (std::size_t i = 0; i < data.frames.size(); ++i) {
        const auto& rec = data.manifest.frames[i];
        if (rec.split == framegen::Split::test && keep(rec.label)) {
            records.push_back(rec);
            frames.push_back(data.frames[i]);
        }
    }
    if (records.empty())
        throw Error(ErrorKind::insufficient_data, "dataset has no test frames");
    return accuracy_table(records, frames, model, config.equalize);
}

double channel_accuracy(const baseline::BaselineModel& model, const channel::ChannelSpec& base_channel,
                        std::size_t num_taps, double decay_db_per_tap, double snr_db,
                        const std::optional<obf::ObfuscationParams>& obf, bool equalize, std::size_t frames,
                        std::uint64_t seed)
{
    if (frames == 0)
        throw Error(ErrorKind::invalid_parameter, "frames must be >= 1");
    if (num_taps == 0)
        throw Error(ErrorKind::invalid_parameter, "num_taps must be >= 1");
    constexpr std::size_t ns = std::size(modem::digital_schemes);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < frames; ++i) {
        framegen::FrameSpec spec;
        spec.scheme = modem::digital_schemes[i % ns];
        spec.snr_db = snr_db;
        spec.obf = obf;
        spec.seed = derive_seed(seed, i);
        const std::uint64_t ch_seed = derive_seed(spec.seed, noise_stream);
        const std::uint64_t tap_seed = derive_seed(spec.seed, fading_stream);
        if (base_channel.kind == channel::ChannelKind::awgn)
            spec.channel = channel::ChannelSpec::awgn(snr_db, ch_seed);
        else if (num_taps == 1)
            spec.channel = channel::ChannelSpec::flat(channel::rayleigh_taps(1, 0.0, tap_seed)[0], snr_db, ch_seed);
        else
            spec.channel = channel::ChannelSpec::multipath(channel::rayleigh_taps(num_taps, decay_db_per_tap, tap_seed),
                                                           snr_db, ch_seed,
                                                           static_cast<std::size_t>(spec.format.samples_per_symbol));
        IqFrame f = framegen::build_frame(spec);
        if (equalize && obf)
            f = obf::remove(std::move(f), *obf);
        const IqFrame rec = framegen::payload_record(f, spec.format.samples_per_frame);
        correct += baseline::classify(rec, model).scheme == spec.scheme;
    }
    return static_cast<double>(correct) / static_cast<double>(frames);
}

std::vector<FadingRow> run_fading_sweep(const FadingSweepConfig& config)
{
    if (config.tap_counts.empty() || config.snr_grid.empty() || config.modes.empty() || config.equalizers.empty())
        throw Error(ErrorKind::invalid_config, "fading sweep needs tap counts, SNRs, modes and equalizers");
    if (std::find(config.tap_counts.begin(), config.tap_counts.end(), std::size_t{0}) != config.tap_counts.end())
        throw Error(ErrorKind::invalid_config, "tap counts must be >= 1");
    config.obf.validate();
    std::optional<baseline::BaselineModel> model;
    if (config.model_path)
        model = baseline::load_model(*config.model_path);

    const std::size_t nt = config.tap_counts.size(), ng = config.snr_grid.size(), nm = config.modes.size(),
                      ne = config.equalizers.size();
    std::vector<FadingRow> rows(nt * ng * nm * ne);
    detail::parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        const std::size_t ei = i % ne, mi = (i / ne) % nm, gi = (i / (ne * nm)) % ng, ti = i / (ne * nm * ng);
        const std::size_t taps = config.tap_counts[ti];
        LinkSetup s;
        s.scheme = config.scheme;
        s.es_n0_db = config.snr_grid[gi];
        s.fading = taps == 1 ? Fading::flat_rayleigh : Fading::multipath_rayleigh;
        s.num_taps = taps;
        s.decay_db_per_tap = config.decay_db_per_tap;
        s.equalizer = config.equalizers[ei];
        s.num_symbols = config.symbols_per_point;
        s.symbols_per_frame = config.symbols_per_frame;
        s.seed = derive_seed(config.seed, ti * ng + gi);
        s = with_mode(s, config.modes[mi], config.obf);
        const LinkResult r = simulate_link(s);
        FadingRow row;
        row.snr_db = s.es_n0_db;
        row.num_taps = taps;
        row.mode = config.modes[mi];
        row.equalizer = r.equalizer_used;
        row.symbols = r.symbols;
        row.errors = r.errors;
        row.ser = r.ser();
        row.ci95 = r.ci95();
        rows[i] = row;
    });

    if (model) {
        // Classification does not depend on the equalizer: one run per
        // (taps, snr, mode), shared by its equalizer rows.
        std::vector<double> acc(nt * ng * nm);
        detail::parallel_for(acc.size(), config.threads, [&](std::size_t k) {
            const std::size_t mi = k % nm, gi = (k / nm) % ng, ti = k / (nm * ng);
            const LinkMode mode = config.modes[mi];
            channel::ChannelSpec base;
            base.kind = config.tap_counts[ti] == 1 ? channel::ChannelKind::flat : channel::ChannelKind::multipath;
            std::optional<obf::ObfuscationParams> p;
            if (mode != LinkMode::clean)
                p = config.obf;
            acc[k] = channel_accuracy(*model, base, config.tap_counts[ti], config.decay_db_per_tap,
                                      config.snr_grid[gi], p, mode == LinkMode::obf_eq, config.frames_per_point,
                                      derive_seed(config.seed, 0xacc0000 + ti * ng + gi));
        });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].accuracy = acc[i / ne];
            rows[i].frames = config.frames_per_point;
        }
    }
    return rows;
}

void write_spectrogram(std::ostream& out, const dsp::Spectrogram& s)
{
    const auto old = out.precision(15);
    out << "# rows=" << s.rows << '\n'
        << "# cols=" << s.cols << '\n'
        << "# sample_rate=" << s.sample_rate << '\n'
        << "# window_len=" << s.params.window_len << '\n'
        << "# hop=" << s.params.hop << '\n'
        << "# fft_len=" << s.params.fft_len << '\n'
        << "# window=" << (s.params.window == dsp::WindowKind::hann ? "hann" : "rectangular") << '\n'
        << "# first_bin_hz=" << (s.cols ? s.bin_frequency(0) : 0.0) << '\n';
    out.precision(9);
    for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c)
            out << (c ? "," : "") << s.at(r, c);
        out << '\n';
    }
    out.precision(old);
}

void write_ser_csv(std::ostream& out, std::span<const SerRow> rows, std::uint64_t seed, std::uint64_t hash)
{
    write_header(out, seed, hash);
    out << "snr_db,mode,symbols,errors,ser,ci95\n";
    const auto old = out.precision(10);
    for (const auto& r : rows)
        out << r.snr_db << ',' << to_string(r.mode) << ',' << r.symbols << ',' << r.errors << ',' << r.ser << ','
            << r.ci95 << '\n';
    out.precision(old);
}

void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows, std::uint64_t seed, std::uint64_t hash)
{
    write_header(out, seed, hash);
    out << "snr_db,delta_f,f_m,accuracy,n\n";
    const auto old = out.precision(10);
    for (const auto& r : rows)
        out << r.snr_db << ',' << r.delta_f << ',' << r.f_m << ',' << r.accuracy << ',' << r.n << '\n';
    out.precision(old);
}

void write_fading_csv(std::ostream& out, std::span<const FadingRow> rows, std::uint64_t seed, std::uint64_t hash)
{
    write_header(out, seed, hash);
    out << "snr_db,num_taps,mode,equalizer,symbols,errors,ser,ci95,accuracy,frames\n";
    const auto old = out.precision(10);
    for (const auto& r : rows) {
        out << r.snr_db << ',' << r.num_taps << ',' << to_string(r.mode) << ',' << to_string(r.equalizer) << ','
            << r.symbols << ',' << r.errors << ',' << r.ser << ',' << r.ci95 << ',';
        if (r.accuracy)
            out << *r.accuracy;
        out << ',' << r.frames << '\n';
    }
    out.precision(old);
}

std::uint64_t config_hash(const json& j)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json to_json(const SerSweepConfig& c)
{
    return {{"scheme", modem::name(c.scheme)},
            {"snr_grid", c.snr_grid},
            {"obf", obf_json(c.obf)},
            {"modes", modes_json(c.modes)},
            {"symbols_per_point", c.symbols_per_point}};
}

json to_json(const FadingSweepConfig& c)
{
    json eqs = json::array();
    for (Equalizer e : c.equalizers)
        eqs.push_back(to_string(e));
    return {{"scheme", modem::name(c.scheme)},
            {"tap_counts", c.tap_counts},
            {"decay_db_per_tap", c.decay_db_per_tap},
            {"snr_grid", c.snr_grid},
            {"obf", obf_json(c.obf)},
            {"modes", modes_json(c.modes)},
            {"equalizers", eqs},
            {"symbols_per_point", c.symbols_per_point},
            {"symbols_per_frame", c.symbols_per_frame},
            {"frames_per_point", c.frames_per_point}};
}

SerSweepConfig ser_config_from_json(const json& j)
{
    try {
        SerSweepConfig c;
        if (j.contains("scheme"))
            c.scheme = modem::scheme_from_name(j["scheme"].get<std::string>());
        c.snr_grid = j.value("snr_grid", c.snr_grid);
        if (j.contains("obf"))
            c.obf = obf_from(j["obf"], c.obf);
        if (j.contains("modes"))
            c.modes = modes_from(j["modes"]);
        c.symbols_per_point = j.value("symbols_per_point", c.symbols_per_point);
        if (c.snr_grid.empty() || c.modes.empty())
            throw Error(ErrorKind::invalid_config, "ser_sweep needs SNRs and modes");
        if (c.symbols_per_point < min_sweep_symbols)
            throw Error(ErrorKind::invalid_config,
                        "ser_sweep needs at least " + std::to_string(min_sweep_symbols) + " symbols per point");
        c.obf.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("ser_sweep config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_config)
            throw;
        throw Error(ErrorKind::invalid_config, e.what());
    }
}

FadingSweepConfig fading_config_from_json(const json& j)
{
    try {
        FadingSweepConfig c;
        if (j.contains("scheme"))
            c.scheme = modem::scheme_from_name(j["scheme"].get<std::string>());
        if (j.contains("tap_counts")) {
            c.tap_counts.clear();
            for (const auto& t : j["tap_counts"]) {
                if (!t.is_number_unsigned() || t.get<std::size_t>() == 0)
                    throw Error(ErrorKind::invalid_config, "tap counts must be positive integers");
                c.tap_counts.push_back(t.get<std::size_t>());
            }
        }
        c.decay_db_per_tap = j.value("decay_db_per_tap", c.decay_db_per_tap);
        c.snr_grid = j.value("snr_grid", c.snr_grid);
        if (j.contains("obf"))
            c.obf = obf_from(j["obf"], c.obf);
        if (j.contains("modes"))
            c.modes = modes_from(j["modes"]);
        if (j.contains("equalizers")) {
            c.equalizers.clear();
            for (const auto& e : j["equalizers"])
                c.equalizers.push_back(equalizer_from_string(e.get<std::string>()));
        }
        c.symbols_per_point = j.value("symbols_per_point", c.symbols_per_point);
        c.symbols_per_frame = j.value("symbols_per_frame", c.symbols_per_frame);
        c.frames_per_point = j.value("frames_per_point", c.frames_per_point);
        if (c.symbols_per_point == 0 || c.symbols_per_frame == 0 || c.tap_counts.empty() || c.snr_grid.empty() || c.modes.empty() ||
            c.equalizers.empty())
            throw Error(ErrorKind::invalid_config, "fading_sweep has an empty grid");
        c.obf.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("fading_sweep config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_config)
            throw;
        throw Error(ErrorKind::invalid_config, e.what());
    }
}

json default_config()
{
    const dsp::SpectrogramParams sp;
    return {{"seed", 1},
            {"threads", 1},
            {"dataset", framegen::to_json(framegen::DatasetConfig::dataset1(100))},
            {"ser_sweep", to_json(SerSweepConfig{})},
            {"accuracy_sweep", {{"model_mode", "baseline-train"}, {"equalize", false}, {"digital_only", true}}},
            {"spectrogram",
             {{"scheme", "QPSK"},
              {"num_symbols", 4096},
              {"obf", obf_json({300e3, 100e3, 0.0})},
              {"window_len", sp.window_len},
              {"hop", sp.hop},
              {"fft_len", sp.fft_len},
              {"window", "hann"}}},
            {"fading_sweep", to_json(FadingSweepConfig{})}};
}

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double qpsk_ser_theory(double es_n0)
{
    const double q = q_function(std::sqrt(es_n0));
    return 2.0 * q - q * q;
}

} // namespace sigobf::harness
