#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigobf {

enum class ErrorKind {
    invalid_parameter,
    invalid_length,
    degenerate_input,
    unsupported_scheme,
    missing_payload_range,
    state_space_too_large,
    frame_too_short,
    insufficient_data,
    invalid_config,
    io_failure,
    missing_manifest,
    format_mismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Process exit code used by the CLI for each error category (always nonzero).
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace sigobf
