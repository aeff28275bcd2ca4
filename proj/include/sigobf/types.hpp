#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sigobf {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class Scheme { BPSK, QPSK, PSK8, QAM16, QAM64, PAM4, GFSK, BFM, DSBAM, SSBAM };

// Half-open sample interval [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool empty() const noexcept { return end <= begin; }
    bool operator==(const IndexRange&) const = default;
};

// A block of complex baseband samples. Every signal that moves between
// modules (transmitted, received, equalized) is carried as an IqFrame.
struct IqFrame {
    cvec samples;
    double sample_rate = 1.0;
    std::optional<IndexRange> payload_range;
    std::optional<Scheme> label;

    std::size_t size() const noexcept { return samples.size(); }

    // Payload region, or the whole frame when no payload range is set.
    IndexRange payload_or_all() const noexcept
    {
        return payload_range.value_or(IndexRange{0, samples.size()});
    }

    // Throws Error(invalid_parameter) when sample_rate <= 0 or the payload
    // range falls outside the sample buffer.
    void validate() const;
};

} // namespace sigobf
