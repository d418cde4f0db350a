#pragma once

#include <stdexcept>
#include <string>

namespace mseg {

// Base for every error the pipeline raises. CLI commands catch this and
// exit nonzero with the message.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MSEG_DEFINE_ERROR(Name)                                   \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg) : Error(msg) {}     \
    }

MSEG_DEFINE_ERROR(MalformedRow);
MSEG_DEFINE_ERROR(NonMonotonicTime);
MSEG_DEFINE_ERROR(EmptyTrip);
MSEG_DEFINE_ERROR(OutOfBounds);
MSEG_DEFINE_ERROR(WindowTooLarge);
MSEG_DEFINE_ERROR(EmptyWindow);
MSEG_DEFINE_ERROR(SignalTooShort);
MSEG_DEFINE_ERROR(SegmentTooShort);
MSEG_DEFINE_ERROR(InsufficientData);
MSEG_DEFINE_ERROR(ShapeMismatch);
MSEG_DEFINE_ERROR(MissingClass);
MSEG_DEFINE_ERROR(EmptyDataset);
MSEG_DEFINE_ERROR(VersionMismatch);
MSEG_DEFINE_ERROR(CorruptFile);
MSEG_DEFINE_ERROR(EmptyInput);
MSEG_DEFINE_ERROR(OverlappingEvents);
MSEG_DEFINE_ERROR(TripTooShort);
MSEG_DEFINE_ERROR(IoFailure);
MSEG_DEFINE_ERROR(ConfigError);

#undef MSEG_DEFINE_ERROR

}  // namespace mseg
