#include "sigobf/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "sigobf/error.hpp"
#include "sigobf/fft.hpp"
#include "sigobf/modems.hpp"

namespace sigobf::baseline {
using nlohmann::json;

namespace {

constexpr std::size_t dim = FeatureVector::size;
using Vec = Eigen::Matrix<double, dim, 1>;
using Mat = Eigen::Matrix<double, dim, dim>;

constexpr const char* feature_names[dim] = {"c20", "c40", "c41", "c42", "envelope_kurtosis", "spectral_symmetry",
                                            "max_psd_concentration"};

Vec to_vec(const FeatureVector& f)
{
    const auto v = f.values();
    return Vec(v.data());
}

double log_likelihood(const Vec& x, const ClassModel& c)
{
    const Vec mean(c.mean.data());
    const Mat cov = Eigen::Map<const Eigen::Matrix<double, dim, dim, Eigen::RowMajor>>(c.covariance.data());
    const Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::degenerate_input, "class covariance is not positive definite");
    const Vec d = x - mean;
    const Vec z = llt.matrixL().solve(d);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * (z.squaredNorm() + logdet + static_cast<double>(dim) * std::log(2.0 * M_PI));
}

} // namespace

std::array<double, FeatureVector::size> FeatureVector::values() const noexcept
{
    return {c20, c40, c41, c42, envelope_kurtosis, spectral_symmetry, max_psd_concentration};
}

FeatureVector extract_features(const IqFrame& frame)
{
    const IndexRange r = frame.payload_or_all();
    if (r.size() < min_feature_samples)
        throw Error(ErrorKind::frame_too_short, "feature extraction needs at least " +
                                                    std::to_string(min_feature_samples) + " samples");
    const std::size_t n = r.size();
    const auto dn = static_cast<double>(n);
    cvec x(frame.samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
           frame.samples.begin() + static_cast<std::ptrdiff_t>(r.end));
    double power = 0.0;
    for (const cplx& v : x)
        power += std::norm(v);
    power /= dn;
    if (!(power > 0.0) || !std::isfinite(power))
        throw Error(ErrorKind::degenerate_input, "frame has zero or non-finite power");
    const double scale = 1.0 / std::sqrt(power);
    for (cplx& v : x)
        v *= scale;

    cplx m20{}, m40{}, m41{};
    double m42 = 0.0;
    for (const cplx& v : x) {
        const cplx v2 = v * v;
        m20 += v2;
        m40 += v2 * v2;
        m41 += v2 * std::norm(v);
        m42 += std::norm(v) * std::norm(v);
    }
    m20 /= dn;
    m40 /= dn;
    m41 /= dn;
    m42 /= dn;

    FeatureVector f;
    f.c20 = std::abs(m20);
    f.c40 = std::abs(m40 - 3.0 * m20 * m20);
    f.c41 = std::abs(m41 - 3.0 * m20);
    f.c42 = m42 - std::norm(m20) - 2.0;

    std::vector<double> env(n);
    double env_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        env[i] = std::abs(x[i]);
        env_mean += env[i];
    }
    env_mean /= dn;
    double m2 = 0.0, m4 = 0.0;
    for (double a : env) {
        const double d = a - env_mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= dn;
    m4 /= dn;
    f.envelope_kurtosis = m2 > 1e-18 ? m4 / (m2 * m2) - 3.0 : 0.0;

    const cvec spec = fft::forward(x);
    double upper = 0.0, lower = 0.0, total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::norm(spec[k]);
        total += p;
        if (k == 0 || 2 * k == n)
            continue;
        (2 * k < n ? upper : lower) += p;
    }
    f.spectral_symmetry = total > 0.0 ? (upper - lower) / total : 0.0;

    cvec acn(n);
    for (std::size_t i = 0; i < n; ++i)
        acn[i] = env_mean > 0.0 ? env[i] / env_mean - 1.0 : 0.0;
    const cvec aspec = fft::forward(acn);
    double peak = 0.0;
    for (const cplx& v : aspec)
        peak = std::max(peak, std::norm(v));
    f.max_psd_concentration = peak / dn;
    return f;
}

std::vector<Scheme> BaselineModel::labels() const
{
    std::vector<Scheme> out;
    for (const auto& c : classes)
        out.push_back(c.label);
    return out;
}

BaselineModel train_baseline(std::span<const IqFrame> frames)
{
    if (frames.empty())
        throw Error(ErrorKind::insufficient_data, "no training frames");
    std::map<Scheme, std::vector<Vec>> groups;
    for (const IqFrame& f : frames) {
        if (!f.label)
            throw Error(ErrorKind::invalid_parameter, "training frame without a label");
        groups[*f.label].push_back(to_vec(extract_features(f)));
    }
    BaselineModel model;
    for (const auto& [label, xs] : groups) {
        if (xs.size() < min_frames_per_class)
            throw Error(ErrorKind::insufficient_data,
                        std::string(modem::name(label)) + " has " + std::to_string(xs.size()) + " frames, need " +
                            std::to_string(min_frames_per_class));
        Vec mean = Vec::Zero();
        for (const Vec& x : xs)
            mean += x;
        mean /= static_cast<double>(xs.size());
        Mat cov = Mat::Zero();
        for (const Vec& x : xs)
            cov += (x - mean) * (x - mean).transpose();
        cov /= static_cast<double>(xs.size() - 1);
        // Ridge scaled to the average variance keeps nearly constant
        // features (e.g. c20 of PSK) from collapsing the covariance.
        const double ridge = 1e-3 * cov.trace() / static_cast<double>(dim) + 1e-9;
        cov.diagonal().array() += ridge;

        ClassModel c;
        c.label = label;
        for (std::size_t i = 0; i < dim; ++i) {
            c.mean[i] = mean(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < dim; ++j)
                c.covariance[i * dim + j] = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        model.classes.push_back(c);
    }
    return model;
}

Classification classify(const FeatureVector& features, const BaselineModel& model)
{
    if (model.classes.empty())
        throw Error(ErrorKind::invalid_parameter, "empty model");
    const Vec x = to_vec(features);
    Classification out;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : model.classes) {
        const double s = log_likelihood(x, c);
        out.scores.push_back(s);
        if (s > best) {
            best = s;
            out.scheme = c.label;
        }
    }
    return out;
}

Classification classify(const IqFrame& frame, const BaselineModel& model)
{
    return classify(extract_features(frame), model);
}

double accuracy(std::span<const IqFrame> frames, const BaselineModel& model)
{
    if (frames.empty())
        throw Error(ErrorKind::insufficient_data, "no frames to score");
    std::size_t correct = 0;
    for (const IqFrame& f : frames) {
        if (!f.label)
            throw Error(ErrorKind::invalid_parameter, "frame without a label");
        correct += classify(f, model).scheme == *f.label;
    }
    return static_cast<double>(correct) / static_cast<double>(frames.size());
}

void save_model(const BaselineModel& model, const std::filesystem::path& path)
{
    json classes = json::array();
    for (const auto& c : model.classes)
        classes.push_back({{"label", modem::name(c.label)}, {"mean", c.mean}, {"covariance", c.covariance}});
    const json j{{"version", model_version},
                 {"features", std::vector<std::string>(std::begin(feature_names), std::end(feature_names))},
                 {"classes", classes}};
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::io_failure, "cannot write " + path.string());
    out << j.dump(1) << '\n';
    if (!out)
        throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

BaselineModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io_failure, "cannot open " + path.string());
    BaselineModel model;
    try {
        const json j = json::parse(in);
        if (j.at("version").get<int>() != model_version)
            throw Error(ErrorKind::format_mismatch, "unsupported model version");
        for (const auto& c : j.at("classes")) {
            ClassModel m;
            m.label = modem::scheme_from_name(c.at("label").get<std::string>());
            m.mean = c.at("mean").get<decltype(m.mean)>();
            m.covariance = c.at("covariance").get<decltype(m.covariance)>();
            model.classes.push_back(m);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format_mismatch, std::string("malformed model: ") + e.what());
    }
    if (model.classes.empty())
        throw Error(ErrorKind::format_mismatch, "model has no classes");
    return model;
}

} // namespace sigobf::baseline
