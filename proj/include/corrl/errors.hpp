#pragma once

#include <stdexcept>
#include <string>

namespace corrl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotARow : Error {
    using Error::Error;
};

struct SupportMismatch : Error {
    using Error::Error;
};

struct AdversarySupportViolation : Error {
    using Error::Error;
};

struct ZeroLikelihood : Error {
    using Error::Error;
};

struct EmptyModelSet : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

struct EmptyConfidenceSet : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    using Error::Error;
};

struct AllPairsIdentical : Error {
    using Error::Error;
};

/// Config-file problems carry file/line diagnostics in the message.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace corrl
