#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "sigobf/types.hpp"

namespace sigobf::baseline {

inline constexpr std::size_t min_feature_samples = 256;
inline constexpr std::size_t min_frames_per_class = 20;
inline constexpr int model_version = 1;

// Cumulants are computed on the unit-power frame (c21 = 1), so each is
// already normalized by the matching power of c21:
//   c20 = E[x^2]                         stored as |c20|
//   c40 = E[x^4] - 3 c20^2               stored as |c40|
//   c41 = E[x^3 x*] - 3 c20 c21          stored as |c41|
//   c42 = E[|x|^4] - |c20|^2 - 2 c21^2   real
// With this convention noiseless BPSK symbols give |c40| = 2 and QPSK 1.
struct FeatureVector {
    double c20 = 0.0;
    double c40 = 0.0;
    double c41 = 0.0;
    double c42 = 0.0;
    double envelope_kurtosis = 0.0;  // kurtosis of |x| (excess, about its mean)
    double spectral_symmetry = 0.0;  // (P_upper - P_lower) / P_total
    double max_psd_concentration = 0.0; // max PSD of the centred normalized envelope / N

    static constexpr std::size_t size = 7;
    std::array<double, size> values() const noexcept;
};

FeatureVector extract_features(const IqFrame& frame);

struct ClassModel {
    Scheme label = Scheme::BPSK;
    std::array<double, FeatureVector::size> mean{};
    std::array<double, FeatureVector::size * FeatureVector::size> covariance{}; // row-major, regularized
};

// Gaussian discriminant over features, one full-covariance Gaussian per
// class, equal priors.
struct BaselineModel {
    std::vector<ClassModel> classes;
    std::vector<Scheme> labels() const;
};

// Frames must carry labels. Throws insufficient_data when a class has fewer
// than min_frames_per_class frames or there are none.
BaselineModel train_baseline(std::span<const IqFrame> frames);

struct Classification {
    Scheme scheme = Scheme::BPSK;
    std::vector<double> scores; // log-likelihood per model class, in model order
};

Classification classify(const IqFrame& frame, const BaselineModel& model);
Classification classify(const FeatureVector& features, const BaselineModel& model);

// Fraction of labelled frames classified correctly.
double accuracy(std::span<const IqFrame> frames, const BaselineModel& model);

void save_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_model(const std::filesystem::path& path);

} // namespace sigobf::baseline
