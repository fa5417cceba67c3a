#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ebwlan {

enum class AccessMode {
    SlottedAloha,
    DcfBasic,
    DcfRtsCts,
};

std::string to_string(AccessMode mode);
AccessMode access_mode_from_string(std::string_view s);

/// Thrown when an iterative solver cannot produce a valid result
/// (no bracket, no fixed point, series divergence, ...).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by queueing transforms when evaluated for a system with rho_tilde >= 1.
struct UnstableSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ebwlan
