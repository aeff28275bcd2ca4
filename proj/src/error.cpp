#include "sigobf/error.hpp"
#include "sigobf/types.hpp"

namespace sigobf {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_length: return "invalid-length";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::unsupported_scheme: return "unsupported-scheme";
    case ErrorKind::missing_payload_range: return "missing-payload-range";
    case ErrorKind::state_space_too_large: return "state-space-too-large";
    case ErrorKind::frame_too_short: return "frame-too-short";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::io_failure: return "io-failure";
    case ErrorKind::missing_manifest: return "missing-manifest";
    case ErrorKind::format_mismatch: return "format-mismatch";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_parameter:
    case ErrorKind::invalid_length:
    case ErrorKind::unsupported_scheme:
    case ErrorKind::missing_payload_range: return 2;
    case ErrorKind::invalid_config: return 3;
    case ErrorKind::io_failure: return 4;
    case ErrorKind::missing_manifest:
    case ErrorKind::format_mismatch: return 5;
    case ErrorKind::degenerate_input:
    case ErrorKind::frame_too_short:
    case ErrorKind::insufficient_data: return 6;
    case ErrorKind::state_space_too_large: return 7;
    }
    return 1;
}

void IqFrame::validate() const
{
    if (!(sample_rate > 0.0))
        throw Error(ErrorKind::invalid_parameter, "sample_rate must be positive");
    if (payload_range) {
        const auto& r = *payload_range;
        if (r.begin > r.end || r.end > samples.size())
            throw Error(ErrorKind::invalid_parameter, "payload_range outside the frame");
    }
}

} // namespace sigobf
