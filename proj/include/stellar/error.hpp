#pragma once

#include <stdexcept>
#include <string>

namespace stellar {

/// Machine-readable failure categories, mirrored by the CLI exit diagnostics.
enum class errc {
    malformed_cell,
    index_range,
    dimension,
    parameter,
    precondition,
    corruption,
    usage,
    capacity,
    out_of_domain,
    non_manifold_edge,
    inconsistent_orientation,
    pseudo_manifold_violation,
    unsupported_cell,
    empty_complex,
    io,
    bad_magic,
    bad_version,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::malformed_cell: return "malformed-cell";
        case errc::index_range: return "index-range";
        case errc::dimension: return "dimension";
        case errc::parameter: return "parameter";
        case errc::precondition: return "precondition";
        case errc::corruption: return "corruption";
        case errc::usage: return "usage";
        case errc::capacity: return "capacity";
        case errc::out_of_domain: return "out-of-domain";
        case errc::non_manifold_edge: return "non-manifold-edge";
        case errc::inconsistent_orientation: return "inconsistent-orientation";
        case errc::pseudo_manifold_violation: return "pseudo-manifold-violation";
        case errc::unsupported_cell: return "unsupported-cell";
        case errc::empty_complex: return "empty-complex";
        case errc::io: return "io";
        case errc::bad_magic: return "bad-magic";
        case errc::bad_version: return "bad-version";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw error(code, message);
}

inline void require(bool condition, errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace stellar
