#include "sigobf/framegen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <system_error>

#include "parallel.hpp"
#include "sigobf/error.hpp"
#include "sigobf/signal_core.hpp"

namespace sigobf::framegen {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// PN127 from x^7 + x^6 + 1 (all-ones seed) followed by a single 0.
constexpr char preamble_hex[] = "fe041851e459d4fa1c49b5bd8d2ee654";

constexpr std::uint64_t split_stream = 0x5b1175b1175ULL;
constexpr std::uint64_t channel_stream = 1;
constexpr std::uint64_t taps_stream = 2;

cvec random_symbols(Scheme s, std::size_t count, Rng& rng)
{
    const auto& c = modem::constellation(s);
    cvec out(count);
    for (auto& v : out)
        v = c.point(static_cast<unsigned>(rng.below(c.size())));
    return out;
}

struct Built {
    IqFrame frame;
    IndexRange payload;
};

Built build_single_carrier(const FrameSpec& spec, Rng& rng)
{
    const FrameFormat& f = spec.format;
    const auto sps = static_cast<std::size_t>(f.samples_per_symbol);
    const std::size_t payload_symbols = (f.samples_per_frame + sps - 1) / sps;
    const auto lead = static_cast<std::size_t>(f.span_symbols);

    const cvec preamble = modem::map_symbols(preamble_bits(), Scheme::QPSK);
    cvec symbols = random_symbols(Scheme::QPSK, lead, rng);
    symbols.insert(symbols.end(), preamble.begin(), preamble.end());
    const cvec payload = random_symbols(spec.scheme, payload_symbols + lead, rng);
    symbols.insert(symbols.end(), payload.begin(), payload.end());

    const auto pulse =
        dsp::design_pulse(dsp::PulseKind::raised_cosine, f.rolloff, f.span_symbols, f.samples_per_symbol);
    const IqFrame full = modem::shape_symbols(symbols, pulse, f.sample_rate);

    const std::size_t start = pulse.delay + lead * sps;
    const std::size_t len = (preamble_symbols + payload_symbols) * sps;
    Built b;
    b.frame.sample_rate = f.sample_rate;
    b.frame.samples.assign(full.samples.begin() + static_cast<std::ptrdiff_t>(start),
                           full.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
    b.payload = {preamble_symbols * sps, len};
    return b;
}

Built build_gfsk(const FrameSpec& spec, Rng& rng)
{
    const FrameFormat& f = spec.format;
    const auto sps = static_cast<std::size_t>(f.samples_per_symbol);
    const std::size_t payload_bits = (f.samples_per_frame + sps - 1) / sps;
    const auto lead = static_cast<std::size_t>(f.span_symbols);
    const modem::GfskParams params;

    modem::Bits bits = modem::random_bits(lead, rng);
    const auto& pre = preamble_bits();
    bits.insert(bits.end(), pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(preamble_symbols));
    const modem::Bits payload = modem::random_bits(payload_bits + lead, rng);
    bits.insert(bits.end(), payload.begin(), payload.end());

    const IqFrame full = modem::modulate_gfsk(bits, f.samples_per_symbol, f.sample_rate, params);
    const std::size_t delay = static_cast<std::size_t>(params.span_symbols) * sps / 2;
    const std::size_t start = delay + lead * sps;
    const std::size_t len = (preamble_symbols + payload_bits) * sps;
    Built b;
    b.frame.sample_rate = f.sample_rate;
    b.frame.samples.assign(full.samples.begin() + static_cast<std::ptrdiff_t>(start),
                           full.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
    b.payload = {preamble_symbols * sps, len};
    return b;
}

Built build_analog(const FrameSpec& spec, Rng& rng)
{
    const FrameFormat& f = spec.format;
    const double cutoff = 0.1 * f.sample_rate / f.samples_per_symbol;
    const auto message = modem::band_limited_message(f.samples_per_frame, cutoff, f.sample_rate, rng);
    modem::AnalogParams params;
    params.sample_rate = f.sample_rate;
    Built b;
    b.frame = modem::modulate_analog(message, spec.scheme, params);
    b.payload = {0, b.frame.size()};
    return b;
}

Built build_ofdm(const FrameSpec& spec, Rng& rng)
{
    const ofdm::OfdmConfig& cfg = *spec.ofdm;
    const std::size_t data = cfg.num_data_carriers();
    const std::size_t payload_ofdm = (spec.format.samples_per_frame + cfg.symbol_len() - 1) / cfg.symbol_len();

    const cvec preamble = modem::map_symbols(preamble_bits(), Scheme::QPSK);
    cvec pre_data(data);
    for (std::size_t k = 0; k < data; ++k)
        pre_data[k] = preamble[k % preamble.size()];
    cvec freq = ofdm::place_carriers(pre_data, cfg);
    for (std::size_t s = 0; s < payload_ofdm; ++s) {
        const cvec placed = ofdm::place_carriers(random_symbols(spec.scheme, data, rng), cfg);
        freq.insert(freq.end(), placed.begin(), placed.end());
    }
    Built b;
    b.frame = ofdm::ofdm_modulate(freq, cfg);
    b.payload = {cfg.symbol_len(), b.frame.size()};
    return b;
}

std::string channel_name(channel::ChannelKind k)
{
    switch (k) {
    case channel::ChannelKind::awgn: return "awgn";
    case channel::ChannelKind::flat: return "flat";
    case channel::ChannelKind::multipath: return "multipath";
    }
    return "awgn";
}

channel::ChannelKind channel_from_name(const std::string& s)
{
    if (s == "awgn") return channel::ChannelKind::awgn;
    if (s == "flat") return channel::ChannelKind::flat;
    if (s == "multipath") return channel::ChannelKind::multipath;
    throw Error(ErrorKind::invalid_config, "unknown channel '" + s + "'");
}

json obf_to_json(const std::optional<obf::ObfuscationParams>& p)
{
    if (!p)
        return nullptr;
    return json{{"delta_f", p->delta_f}, {"f_m", p->f_m}, {"t0", p->t0}};
}

std::optional<obf::ObfuscationParams> obf_from_json(const json& j)
{
    if (j.is_null())
        return std::nullopt;
    obf::ObfuscationParams p;
    p.delta_f = j.at("delta_f").get<double>();
    p.f_m = j.at("f_m").get<double>();
    p.t0 = j.value("t0", 0.0);
    return p;
}

} // namespace

const modem::Bits& preamble_bits()
{
    static const modem::Bits bits = [] {
        modem::Bits out;
        for (const char* p = preamble_hex; *p; ++p) {
            const int v = *p <= '9' ? *p - '0' : *p - 'a' + 10;
            for (int b = 3; b >= 0; --b)
                out.push_back(static_cast<std::uint8_t>((v >> b) & 1));
        }
        return out;
    }();
    return bits;
}

void FrameSpec::validate() const
{
    if (format.samples_per_frame == 0 || format.samples_per_symbol < 2 || !(format.sample_rate > 0.0))
        throw Error(ErrorKind::invalid_config, "invalid frame format");
    if (ofdm) {
        static constexpr Scheme allowed[] = {Scheme::BPSK, Scheme::QPSK, Scheme::PSK8, Scheme::QAM16, Scheme::QAM64};
        if (std::find(std::begin(allowed), std::end(allowed), scheme) == std::end(allowed))
            throw Error(ErrorKind::invalid_config,
                        "OFDM frames carry BPSK, QPSK, 8PSK, 16QAM or 64QAM, not " + std::string(modem::name(scheme)));
        ofdm->validate();
    }
    if (obf)
        obf->validate();
}

IqFrame build_frame(const FrameSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    Built b;
    if (spec.ofdm)
        b = build_ofdm(spec, rng);
    else if (modem::is_analog(spec.scheme))
        b = build_analog(spec, rng);
    else if (spec.scheme == Scheme::GFSK)
        b = build_gfsk(spec, rng);
    else
        b = build_single_carrier(spec, rng);

    IqFrame frame = dsp::normalize_power(std::move(b.frame));
    frame.payload_range = b.payload;
    frame.label = spec.scheme;
    const double reference = dsp::mean_power(std::span<const cplx>(frame.samples).subspan(b.payload.begin, b.payload.size()));
    if (spec.obf)
        frame = obf::apply(std::move(frame), *spec.obf);

    channel::ChannelSpec ch = spec.channel;
    ch.snr_db = spec.snr_db;
    return channel::apply_channel(std::move(frame), ch, reference);
}

IqFrame payload_record(const IqFrame& frame, std::size_t samples_per_frame)
{
    const IndexRange r = frame.payload_or_all();
    if (r.size() < samples_per_frame)
        throw Error(ErrorKind::invalid_length, "payload shorter than one record");
    IqFrame out;
    out.sample_rate = frame.sample_rate;
    out.label = frame.label;
    out.samples.assign(frame.samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
                       frame.samples.begin() + static_cast<std::ptrdiff_t>(r.begin + samples_per_frame));
    out.payload_range = IndexRange{0, samples_per_frame};
    return out;
}

std::vector<IqFrame> window_frames(const IqFrame& stream, std::size_t window_len)
{
    if (window_len == 0)
        throw Error(ErrorKind::invalid_parameter, "window_len must be >= 1");
    std::vector<IqFrame> out;
    for (std::size_t start = 0; start + window_len <= stream.size(); start += window_len) {
        IqFrame w;
        w.sample_rate = stream.sample_rate;
        w.label = stream.label;
        w.samples.assign(stream.samples.begin() + static_cast<std::ptrdiff_t>(start),
                         stream.samples.begin() + static_cast<std::ptrdiff_t>(start + window_len));
        out.push_back(std::move(w));
    }
    return out;
}

std::string_view to_string(Split s) noexcept
{
    switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    }
    return "train";
}

Split split_from_string(std::string_view text)
{
    if (text == "train") return Split::train;
    if (text == "val") return Split::val;
    if (text == "test") return Split::test;
    throw Error(ErrorKind::format_mismatch, "unknown split '" + std::string(text) + "'");
}

DatasetConfig DatasetConfig::dataset1(std::size_t scale_divisor)
{
    if (scale_divisor == 0)
        throw Error(ErrorKind::invalid_config, "scale_divisor must be >= 1");
    DatasetConfig c;
    c.profile = "dataset1";
    c.schemes.assign(std::begin(modem::all_schemes), std::end(modem::all_schemes));
    for (int snr = -10; snr <= 30; snr += 2)
        c.snr_grid.push_back(snr);
    c.train_count = 128000 / scale_divisor;
    c.val_count = 16000 / scale_divisor;
    c.test_count = 16000 / scale_divisor;
    return c;
}

DatasetConfig DatasetConfig::dataset2(std::size_t scale_divisor)
{
    DatasetConfig c = dataset1(scale_divisor);
    c.profile = "dataset2";
    c.schemes = {Scheme::BPSK, Scheme::QPSK, Scheme::PSK8, Scheme::QAM16, Scheme::QAM64};
    c.ofdm = true;
    c.ofdm_config = ofdm::OfdmConfig::dataset_default(c.format.sample_rate);
    c.train_count = 40000 / scale_divisor;
    c.val_count = 5000 / scale_divisor;
    c.test_count = 5000 / scale_divisor;
    return c;
}

void DatasetConfig::validate() const
{
    if (schemes.empty() || snr_grid.empty() || obf_pairs.empty())
        throw Error(ErrorKind::invalid_config, "schemes, snr_grid and obf_pairs must be non-empty");
    if (total() == 0)
        throw Error(ErrorKind::invalid_config, "dataset has no frames");
    if (num_taps == 0)
        throw Error(ErrorKind::invalid_config, "num_taps must be >= 1");
    for (const auto& p : obf_pairs)
        if (p)
            p->validate();
    for (double snr : snr_grid)
        if (std::isnan(snr))
            throw Error(ErrorKind::invalid_config, "NaN in snr_grid");
    FrameSpec probe;
    probe.format = format;
    if (ofdm)
        probe.ofdm = ofdm_config;
    for (Scheme s : schemes) {
        probe.scheme = s;
        probe.validate();
    }
}

FrameSpec dataset_frame_spec(const DatasetConfig& config, std::size_t index)
{
    const std::size_t ns = config.schemes.size();
    const std::size_t ng = config.snr_grid.size();
    const std::size_t np = config.obf_pairs.size();
    FrameSpec spec;
    spec.scheme = config.schemes[index % ns];
    spec.snr_db = config.snr_grid[(index / ns) % ng];
    spec.obf = config.obf_pairs[(index / (ns * ng)) % np];
    spec.seed = derive_seed(config.master_seed, index);
    spec.format = config.format;
    if (config.ofdm)
        spec.ofdm = config.ofdm_config;

    const std::uint64_t ch_seed = derive_seed(spec.seed, channel_stream);
    switch (config.channel) {
    case channel::ChannelKind::awgn: spec.channel = channel::ChannelSpec::awgn(spec.snr_db, ch_seed); break;
    case channel::ChannelKind::flat: {
        const cvec h = channel::rayleigh_taps(1, 0.0, derive_seed(spec.seed, taps_stream));
        spec.channel = channel::ChannelSpec::flat(h[0], spec.snr_db, ch_seed);
        break;
    }
    case channel::ChannelKind::multipath: {
        cvec taps = channel::rayleigh_taps(config.num_taps, config.decay_db_per_tap, derive_seed(spec.seed, taps_stream));
        // OFDM frames use sample-spaced taps (well inside the cyclic prefix),
        // single-carrier frames symbol-spaced taps.
        const std::size_t spacing = config.ofdm ? 1 : static_cast<std::size_t>(config.format.samples_per_symbol);
        spec.channel = channel::ChannelSpec::multipath(std::move(taps), spec.snr_db, ch_seed, spacing);
        break;
    }
    }
    return spec;
}

std::vector<Split> assign_splits(const DatasetConfig& config)
{
    const std::size_t n = config.total();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(config.master_seed, split_stream));
    for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<Split> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Split s = j < config.train_count ? Split::train
                        : j < config.train_count + config.val_count ? Split::val
                                                                     : Split::test;
        out[perm[j]] = s;
    }
    return out;
}

std::vector<GeneratedFrame> generate_frames(const DatasetConfig& config, std::size_t first, std::size_t count)
{
    config.validate();
    if (first + count > config.total())
        throw Error(ErrorKind::invalid_parameter, "frame range beyond the dataset");
    const std::vector<Split> splits = assign_splits(config);
    const std::uint64_t record_bytes = config.format.samples_per_frame * 2 * sizeof(float);

    std::vector<GeneratedFrame> out(count);
    detail::parallel_for(count, config.threads, [&](std::size_t k) {
        const std::size_t index = first + k;
        const FrameSpec spec = dataset_frame_spec(config, index);
        GeneratedFrame g;
        g.samples = payload_record(build_frame(spec), config.format.samples_per_frame);
        g.record.index = index;
        g.record.file_offset = index * record_bytes;
        g.record.label = spec.scheme;
        g.record.snr_db = spec.snr_db;
        g.record.obf = spec.obf;
        g.record.split = splits[index];
        g.record.seed = spec.seed;
        out[k] = std::move(g);
    });
    return out;
}

std::vector<std::uint8_t> encode_record(std::span<const cplx> samples)
{
    std::vector<std::uint8_t> out;
    out.reserve(samples.size() * 8);
    auto put = [&](double v) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 0; b < 4; ++b)
            out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    };
    for (const cplx& s : samples) {
        put(s.real());
        put(s.imag());
    }
    return out;
}

cvec decode_record(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() % 8 != 0)
        throw Error(ErrorKind::format_mismatch, "record size is not a whole number of samples");
    auto get = [&](std::size_t off) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(bytes[off + static_cast<std::size_t>(b)]) << (8 * b);
        return static_cast<double>(std::bit_cast<float>(bits));
    };
    cvec out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {get(8 * i), get(8 * i + 4)};
    return out;
}

void DatasetManifest::validate() const
{
    if (format_version != framegen::format_version)
        throw Error(ErrorKind::format_mismatch, "unsupported format_version " + std::to_string(format_version));
    if (samples_per_frame == 0 || !(sample_rate > 0.0))
        throw Error(ErrorKind::format_mismatch, "manifest has an invalid frame geometry");
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].file_offset < frames[i - 1].file_offset + record_bytes())
            throw Error(ErrorKind::format_mismatch, "record offsets overlap or are not increasing");
}

void write_manifest(const DatasetManifest& m, const fs::path& path)
{
    json frames = json::array();
    for (const auto& r : m.frames) {
        frames.push_back({{"index", r.index},
                          {"file_offset", r.file_offset},
                          {"label", modem::name(r.label)},
                          {"snr_db", r.snr_db},
                          {"delta_f", r.obf ? json(r.obf->delta_f) : json(nullptr)},
                          {"f_m", r.obf ? json(r.obf->f_m) : json(nullptr)},
                          {"t0", r.obf ? json(r.obf->t0) : json(nullptr)},
                          {"split", to_string(r.split)},
                          {"seed", r.seed}});
    }
    json classes = json::array();
    for (Scheme s : m.classes)
        classes.push_back(modem::name(s));
    const json j{{"format_version", m.format_version},
                 {"profile", m.profile},
                 {"sample_rate", m.sample_rate},
                 {"samples_per_frame", m.samples_per_frame},
                 {"samples_per_symbol", m.samples_per_symbol},
                 {"master_seed", m.master_seed},
                 {"channel", m.channel},
                 {"ofdm", m.ofdm},
                 {"data_file", m.data_file},
                 {"record_bytes", m.record_bytes()},
                 {"sample_format", "float32le-interleaved-iq"},
                 {"classes", classes},
                 {"frames", frames}};
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::io_failure, "cannot write " + path.string());
    out << j.dump(1) << '\n';
    if (!out)
        throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

DatasetManifest read_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::missing_manifest, "no manifest at " + path.string());
    DatasetManifest m;
    try {
        const json j = json::parse(in);
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != format_version)
            throw Error(ErrorKind::format_mismatch, "unsupported format_version " + std::to_string(m.format_version));
        m.profile = j.value("profile", "");
        m.sample_rate = j.at("sample_rate").get<double>();
        m.samples_per_frame = j.at("samples_per_frame").get<std::size_t>();
        m.samples_per_symbol = j.at("samples_per_symbol").get<int>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.channel = j.value("channel", "awgn");
        m.ofdm = j.value("ofdm", false);
        m.data_file = j.at("data_file").get<std::string>();
        if (j.contains("record_bytes") && j["record_bytes"].get<std::uint64_t>() != m.record_bytes())
            throw Error(ErrorKind::format_mismatch, "record_bytes disagrees with samples_per_frame");
        for (const auto& c : j.at("classes"))
            m.classes.push_back(modem::scheme_from_name(c.get<std::string>()));
        for (const auto& f : j.at("frames")) {
            FrameRecord r;
            r.index = f.at("index").get<std::size_t>();
            r.file_offset = f.at("file_offset").get<std::uint64_t>();
            r.label = modem::scheme_from_name(f.at("label").get<std::string>());
            r.snr_db = f.at("snr_db").get<double>();
            if (!f.at("delta_f").is_null())
                r.obf = obf::ObfuscationParams{f.at("delta_f").get<double>(), f.at("f_m").get<double>(),
                                               f.value("t0", 0.0)};
            r.split = split_from_string(f.at("split").get<std::string>());
            r.seed = f.at("seed").get<std::uint64_t>();
            m.frames.push_back(r);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format_mismatch, std::string("malformed manifest: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_parameter)
            throw Error(ErrorKind::format_mismatch, e.what());
        throw;
    }
    m.validate();
    return m;
}

DatasetManifest generate_dataset(const DatasetConfig& config, const fs::path& out_dir)
{
    config.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorKind::io_failure, "cannot create " + out_dir.string() + ": " + ec.message());

    DatasetManifest m;
    m.profile = config.profile;
    m.sample_rate = config.ofdm ? config.ofdm_config.sample_rate() : config.format.sample_rate;
    m.samples_per_frame = config.format.samples_per_frame;
    m.samples_per_symbol = config.format.samples_per_symbol;
    m.master_seed = config.master_seed;
    m.channel = channel_name(config.channel);
    m.ofdm = config.ofdm;
    m.classes = config.schemes;

    std::ofstream data(out_dir / m.data_file, std::ios::binary | std::ios::trunc);
    if (!data)
        throw Error(ErrorKind::io_failure, "cannot write " + (out_dir / m.data_file).string());

    constexpr std::size_t batch = 2048;
    for (std::size_t first = 0; first < config.total(); first += batch) {
        const std::size_t count = std::min(batch, config.total() - first);
        for (auto& g : generate_frames(config, first, count)) {
            const auto bytes = encode_record(g.samples.samples);
            data.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            m.frames.push_back(g.record);
        }
        if (!data)
            throw Error(ErrorKind::io_failure, "write failed for " + (out_dir / m.data_file).string());
    }
    data.close();
    write_manifest(m, out_dir / "manifest.json");
    return m;
}

Dataset load_dataset(const fs::path& dir)
{
    Dataset d;
    d.manifest = read_manifest(dir / "manifest.json");
    const fs::path data_path = dir / d.manifest.data_file;
    std::ifstream in(data_path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io_failure, "cannot open " + data_path.string());
    std::error_code ec;
    const auto file_size = fs::file_size(data_path, ec);
    if (ec)
        throw Error(ErrorKind::io_failure, "cannot stat " + data_path.string());
    const std::uint64_t rb = d.manifest.record_bytes();
    std::vector<std::uint8_t> buf(rb);
    for (const auto& r : d.manifest.frames) {
        if (r.file_offset + rb > file_size)
            throw Error(ErrorKind::format_mismatch, "record " + std::to_string(r.index) + " lies beyond the data file");
        in.seekg(static_cast<std::streamoff>(r.file_offset));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(rb));
        if (!in)
            throw Error(ErrorKind::io_failure, "short read in " + data_path.string());
        IqFrame f;
        f.samples = decode_record(buf);
        f.sample_rate = d.manifest.sample_rate;
        f.label = r.label;
        f.payload_range = IndexRange{0, f.samples.size()};
        d.frames.push_back(std::move(f));
    }
    return d;
}

json to_json(const DatasetConfig& c)
{
    json schemes = json::array();
    for (Scheme s : c.schemes)
        schemes.push_back(modem::name(s));
    json pairs = json::array();
    for (const auto& p : c.obf_pairs)
        pairs.push_back(obf_to_json(p));
    json j{{"profile", c.profile},
           {"schemes", schemes},
           {"snr_grid", c.snr_grid},
           {"obf_pairs", pairs},
           {"channel", channel_name(c.channel)},
           {"num_taps", c.num_taps},
           {"decay_db_per_tap", c.decay_db_per_tap},
           {"train_count", c.train_count},
           {"val_count", c.val_count},
           {"test_count", c.test_count},
           {"master_seed", c.master_seed},
           {"samples_per_frame", c.format.samples_per_frame},
           {"samples_per_symbol", c.format.samples_per_symbol},
           {"sample_rate", c.format.sample_rate},
           {"rolloff", c.format.rolloff},
           {"span_symbols", c.format.span_symbols}};
    if (c.ofdm)
        j["ofdm"] = {{"num_subcarriers", c.ofdm_config.num_subcarriers},
                     {"cp_len", c.ofdm_config.cp_len},
                     {"subcarrier_spacing", c.ofdm_config.subcarrier_spacing}};
    else
        j["ofdm"] = false;
    return j;
}

DatasetConfig dataset_config_from_json(const json& j)
{
    try {
        const std::string profile = j.value("profile", "dataset1");
        const std::size_t divisor = j.value("scale_divisor", std::size_t{100});
        DatasetConfig c;
        if (profile == "dataset1" || profile == "custom")
            c = DatasetConfig::dataset1(divisor);
        else if (profile == "dataset2")
            c = DatasetConfig::dataset2(divisor);
        else
            throw Error(ErrorKind::invalid_config, "unknown profile '" + profile + "'");
        c.profile = profile;

        if (j.contains("schemes")) {
            c.schemes.clear();
            for (const auto& s : j["schemes"])
                c.schemes.push_back(modem::scheme_from_name(s.get<std::string>()));
        }
        if (j.contains("snr_grid"))
            c.snr_grid = j["snr_grid"].get<std::vector<double>>();
        if (j.contains("obf_pairs")) {
            c.obf_pairs.clear();
            for (const auto& p : j["obf_pairs"])
                c.obf_pairs.push_back(obf_from_json(p));
        }
        if (j.contains("channel"))
            c.channel = channel_from_name(j["channel"].get<std::string>());
        c.num_taps = j.value("num_taps", c.num_taps);
        c.decay_db_per_tap = j.value("decay_db_per_tap", c.decay_db_per_tap);
        c.train_count = j.value("train_count", c.train_count);
        c.val_count = j.value("val_count", c.val_count);
        c.test_count = j.value("test_count", c.test_count);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.format.samples_per_frame = j.value("samples_per_frame", c.format.samples_per_frame);
        c.format.samples_per_symbol = j.value("samples_per_symbol", c.format.samples_per_symbol);
        c.format.sample_rate = j.value("sample_rate", c.format.sample_rate);
        c.format.rolloff = j.value("rolloff", c.format.rolloff);
        c.format.span_symbols = j.value("span_symbols", c.format.span_symbols);
        if (j.contains("ofdm")) {
            const json& o = j["ofdm"];
            if (o.is_object()) {
                c.ofdm = true;
                c.ofdm_config = ofdm::OfdmConfig::dataset_default(c.format.sample_rate);
                c.ofdm_config.num_subcarriers = o.value("num_subcarriers", c.ofdm_config.num_subcarriers);
                c.ofdm_config.cp_len = o.value("cp_len", c.ofdm_config.cp_len);
                c.ofdm_config.subcarrier_spacing =
                    o.value("subcarrier_spacing",
                            c.format.sample_rate / static_cast<double>(c.ofdm_config.num_subcarriers));
            } else {
                c.ofdm = o.get<bool>();
                if (c.ofdm)
                    c.ofdm_config = ofdm::OfdmConfig::dataset_default(c.format.sample_rate);
            }
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("dataset config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_config)
            throw;
        throw Error(ErrorKind::invalid_config, e.what());
    }
}

} // namespace sigobf::framegen
