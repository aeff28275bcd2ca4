#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigobf/baseline.hpp"
#include "sigobf/channel.hpp"
#include "sigobf/framegen.hpp"
#include "sigobf/obfuscator.hpp"
#include "sigobf/signal_core.hpp"

namespace sigobf::harness {

// Link modes compared in SER sweeps. obf_eq is the legitimate receiver that
// knows (delta_f, f_m); obf_no_eq ignores the obfuscation.
enum class LinkMode { clean, obf_no_eq, obf_eq };
std::string_view to_string(LinkMode m) noexcept;
LinkMode link_mode_from_string(std::string_view text);

enum class Equalizer { matched, mlsd, mmse };
std::string_view to_string(Equalizer e) noexcept;
Equalizer equalizer_from_string(std::string_view text);

enum class Fading { none, flat_rayleigh, multipath_rayleigh, fixed_taps };

// One Monte-Carlo link run. Es/N0 is referenced to the unit-energy
// symbol at the receiver input after the channel power gain.
struct LinkSetup {
    Scheme scheme = Scheme::QPSK;
    double rolloff = 0.5;
    int span_symbols = 10;
    int samples_per_symbol = 8;
    double sample_rate = 40e6;
    double es_n0_db = 10.0;
    std::optional<obf::ObfuscationParams> tx_obf;
    // Parameters the receiver removes; nullopt means no removal.
    std::optional<obf::ObfuscationParams> rx_obf;
    Fading fading = Fading::none;
    std::size_t num_taps = 1;
    double decay_db_per_tap = 3.0;
    cvec fixed_taps;
    Equalizer equalizer = Equalizer::matched;
    std::size_t num_symbols = 100000;
    std::size_t symbols_per_frame = 1000;
    std::uint64_t seed = 1;
    bool keep_error_flags = false;
};

struct LinkResult {
    std::size_t symbols = 0;
    std::size_t errors = 0;
    Equalizer equalizer_used = Equalizer::matched;
    std::vector<std::uint8_t> error_flags; // per counted symbol when requested

    double ser() const noexcept { return symbols ? static_cast<double>(errors) / static_cast<double>(symbols) : 0.0; }
    // Half-width of the normal-approximation 95% interval.
    double ci95() const noexcept;
};

// Frames are seeded by derive_seed(seed, frame), so runs that differ only
// in mode, equalizer, or obfuscation see the same bits and noise.
LinkResult simulate_link(const LinkSetup& setup);

// Receiver-side mode wiring for a LinkSetup.
LinkSetup with_mode(LinkSetup setup, LinkMode mode, const obf::ObfuscationParams& params);

struct SerSweepConfig {
    Scheme scheme = Scheme::QPSK;
    std::vector<double> snr_grid{0, 2, 4, 6, 8, 10, 12};
    obf::ObfuscationParams obf{300e3, 100e3, 0.0};
    std::vector<LinkMode> modes{LinkMode::clean, LinkMode::obf_no_eq, LinkMode::obf_eq};
    std::size_t symbols_per_point = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct SerRow {
    double snr_db = 0.0;
    LinkMode mode = LinkMode::clean;
    std::size_t symbols = 0;
    std::size_t errors = 0;
    double ser = 0.0;
    double ci95 = 0.0;
};

std::vector<SerRow> run_ser_sweep(const SerSweepConfig& config);

// Lower bound on symbols_per_point accepted from configuration files.
inline constexpr std::size_t min_sweep_symbols = 10000;

struct AccuracyRow {
    double snr_db = 0.0;
    double delta_f = 0.0;
    double f_m = 0.0;
    double accuracy = 0.0;
    std::size_t n = 0;
};

enum class ModelMode { baseline_train, baseline_eval };

struct AccuracySweepConfig {
    std::filesystem::path dataset_dir;
    // Training data for baseline-train; defaults to dataset_dir.
    std::optional<std::filesystem::path> train_dataset_dir;
    ModelMode model_mode = ModelMode::baseline_train;
    std::optional<std::filesystem::path> model_path; // read (eval) or written (train)
    // Remove the obfuscation recorded in the manifest before classifying.
    bool equalize = false;
    bool digital_only = false;
};

// Test split accuracy per (snr, delta_f, f_m) cell; clean cells report 0, 0.
std::vector<AccuracyRow> run_accuracy_sweep(const AccuracySweepConfig& config);

// Same grouping over frames already in memory.
std::vector<AccuracyRow> accuracy_table(std::span<const framegen::FrameRecord> records,
                                        std::span<const IqFrame> frames, const baseline::BaselineModel& model,
                                        bool equalize);

struct FadingSweepConfig {
    Scheme scheme = Scheme::BPSK;
    std::vector<std::size_t> tap_counts{2, 4, 8};
    double decay_db_per_tap = 3.0;
    std::vector<double> snr_grid{0, 5, 10, 15, 20};
    obf::ObfuscationParams obf{300e3, 100e3, 0.0};
    std::vector<LinkMode> modes{LinkMode::clean, LinkMode::obf_no_eq, LinkMode::obf_eq};
    std::vector<Equalizer> equalizers{Equalizer::mlsd, Equalizer::mmse};
    std::size_t symbols_per_point = 20000;
    // Fading is drawn once per frame, so short frames average more fades.
    std::size_t symbols_per_frame = 100;
    // Classification under the same channel, when a model is supplied.
    std::optional<std::filesystem::path> model_path;
    std::size_t frames_per_point = 140;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct FadingRow {
    double snr_db = 0.0;
    std::size_t num_taps = 1;
    LinkMode mode = LinkMode::clean;
    Equalizer equalizer = Equalizer::mlsd; // the one actually used
    std::size_t symbols = 0;
    std::size_t errors = 0;
    double ser = 0.0;
    double ci95 = 0.0;
    std::optional<double> accuracy;
    std::size_t frames = 0;
};

std::vector<FadingRow> run_fading_sweep(const FadingSweepConfig& config);

// Classification accuracy of the digital schemes through a channel, with
// or without obfuscation; frames are seeded by derive_seed(seed, i).
double channel_accuracy(const baseline::BaselineModel& model, const channel::ChannelSpec& base_channel,
                        std::size_t num_taps, double decay_db_per_tap, double snr_db,
                        const std::optional<obf::ObfuscationParams>& obf, bool equalize, std::size_t frames,
                        std::uint64_t seed);

// Spectrogram grid writer: "# key=value" header lines, then one comma-separated
// row of magnitudes per time slice, columns from -fs/2 upwards.
void write_spectrogram(std::ostream& out, const dsp::Spectrogram& spec);

// CSV writers; the first line is "# seed=<seed> config_hash=<hex>".
void write_ser_csv(std::ostream& out, std::span<const SerRow> rows, std::uint64_t seed, std::uint64_t config_hash);
void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows, std::uint64_t seed,
                        std::uint64_t config_hash);
void write_fading_csv(std::ostream& out, std::span<const FadingRow> rows, std::uint64_t seed,
                      std::uint64_t config_hash);

// FNV-1a 64 over the compact JSON dump.
std::uint64_t config_hash(const nlohmann::json& j);

nlohmann::json to_json(const SerSweepConfig& c);
nlohmann::json to_json(const FadingSweepConfig& c);
SerSweepConfig ser_config_from_json(const nlohmann::json& j);
FadingSweepConfig fading_config_from_json(const nlohmann::json& j);

// Full default configuration file, every section present.
nlohmann::json default_config();

// Closed-form symbol error rates over AWGN at Es/N0 = es_n0 (linear).
double q_function(double x);
double qpsk_ser_theory(double es_n0);

} // namespace sigobf::harness
