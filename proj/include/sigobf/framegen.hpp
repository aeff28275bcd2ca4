#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigobf/channel.hpp"
#include "sigobf/modems.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/ofdm.hpp"
#include "sigobf/types.hpp"

namespace sigobf::framegen {

inline constexpr int format_version = 1;
inline constexpr std::size_t preamble_symbols = 64;

// 128 preamble bits (64 QPSK symbols), MSB first.
const modem::Bits& preamble_bits();

struct FrameFormat {
    std::size_t samples_per_frame = 1024;
    int samples_per_symbol = 8;
    double sample_rate = 40e6;
    double rolloff = 0.5;
    int span_symbols = 10;
};

struct FrameSpec {
    Scheme scheme = Scheme::QPSK;
    std::optional<ofdm::OfdmConfig> ofdm;
    double snr_db = channel::noiseless;
    std::optional<obf::ObfuscationParams> obf;
    channel::ChannelSpec channel; // its snr_db is overridden by snr_db above
    std::uint64_t seed = 0;
    FrameFormat format;
    void validate() const;
};

// Builds one transmission: [preamble | payload] for digital schemes (the
// preamble is never obfuscated), the whole waveform for analog ones. The
// frame is power-normalized, then obfuscated, then sent through the
// channel. payload_range marks the payload; the payload is at least
// samples_per_frame long.
IqFrame build_frame(const FrameSpec& spec);

// First samples_per_frame payload samples: the exported dataset record.
IqFrame payload_record(const IqFrame& frame, std::size_t samples_per_frame);

// Non-overlapping windows; a trailing remainder is dropped.
std::vector<IqFrame> window_frames(const IqFrame& stream, std::size_t window_len);

enum class Split { train, val, test };
std::string_view to_string(Split s) noexcept;
Split split_from_string(std::string_view text);

struct DatasetConfig {
    std::string profile = "dataset1";
    std::vector<Scheme> schemes;
    std::vector<double> snr_grid;
    // nullopt entries produce clean frames.
    std::vector<std::optional<obf::ObfuscationParams>> obf_pairs{std::nullopt};
    channel::ChannelKind channel = channel::ChannelKind::awgn;
    std::size_t num_taps = 4;
    double decay_db_per_tap = 3.0;
    bool ofdm = false;
    ofdm::OfdmConfig ofdm_config;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    std::size_t test_count = 0;
    std::uint64_t master_seed = 1;
    FrameFormat format;
    unsigned threads = 1;

    // Table-derived profiles with counts divided by scale_divisor.
    static DatasetConfig dataset1(std::size_t scale_divisor = 100);
    static DatasetConfig dataset2(std::size_t scale_divisor = 100);

    std::size_t total() const noexcept { return train_count + val_count + test_count; }
    void validate() const;
};

struct FrameRecord {
    std::size_t index = 0;
    std::uint64_t file_offset = 0;
    Scheme label = Scheme::BPSK;
    double snr_db = 0.0;
    std::optional<obf::ObfuscationParams> obf;
    Split split = Split::train;
    std::uint64_t seed = 0;
};

struct DatasetManifest {
    int format_version = framegen::format_version;
    std::string profile;
    double sample_rate = 0.0;
    std::size_t samples_per_frame = 0;
    int samples_per_symbol = 0;
    std::uint64_t master_seed = 0;
    std::string channel;
    bool ofdm = false;
    std::string data_file = "frames.bin";
    std::vector<Scheme> classes;
    std::vector<FrameRecord> frames;

    std::uint64_t record_bytes() const noexcept { return samples_per_frame * 2 * sizeof(float); }
    void validate() const;
};

// Per-frame specification for frame `index` of a dataset.
FrameSpec dataset_frame_spec(const DatasetConfig& config, std::size_t index);
// Split of every frame index: an exact train/val/test partition drawn from
// a permutation seeded by the master seed.
std::vector<Split> assign_splits(const DatasetConfig& config);

struct GeneratedFrame {
    FrameRecord record;
    IqFrame samples; // exported record (samples_per_frame long)
};

// Frames [first, first+count) generated in memory, in index order.
std::vector<GeneratedFrame> generate_frames(const DatasetConfig& config, std::size_t first, std::size_t count);

// Writes <out_dir>/frames.bin and <out_dir>/manifest.json.
DatasetManifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

// Record encoding: little-endian float32, interleaved I,Q.
std::vector<std::uint8_t> encode_record(std::span<const cplx> samples);
cvec decode_record(std::span<const std::uint8_t> bytes);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct Dataset {
    DatasetManifest manifest;
    std::vector<IqFrame> frames; // labelled, payload_range = whole record
};

Dataset load_dataset(const std::filesystem::path& dir);

// Config file section. Missing keys keep the profile defaults.
nlohmann::json to_json(const DatasetConfig& config);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

} // namespace sigobf::framegen
