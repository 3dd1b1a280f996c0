#pragma once

#include <stdexcept>
#include <string>

namespace favtgan {

// Bad user input: malformed config/manifest, violated invariant, mismatched
// registries. CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failures at run time: unreadable/corrupt files, unwritable directories,
// non-finite losses. CLI maps these to exit code 2.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace favtgan
