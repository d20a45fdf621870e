#pragma once

#include <stdexcept>
#include <string>

namespace throwsense {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define THROWSENSE_ERROR(NAME)                                    \
    class NAME : public Error {                                   \
    public:                                                       \
        explicit NAME(const std::string& msg) : Error(msg) {}     \
    }

// io / data model
THROWSENSE_ERROR(ParseError);
THROWSENSE_ERROR(SchemaError);
THROWSENSE_ERROR(VersionError);
THROWSENSE_ERROR(CorruptionError);
THROWSENSE_ERROR(CongruenceMismatch);
THROWSENSE_ERROR(DanglingRef);

// signal processing
THROWSENSE_ERROR(AllMissing);
THROWSENSE_ERROR(TooShort);
THROWSENSE_ERROR(InvalidCutoff);
THROWSENSE_ERROR(BadWindow);

// throw-frame detection
THROWSENSE_ERROR(ZeroMotion);
THROWSENSE_ERROR(MissingJoint);

// ball tracking
THROWSENSE_ERROR(InsufficientFrames);
THROWSENSE_ERROR(WindowOutOfRange);

// neural net
THROWSENSE_ERROR(ShapeMismatch);
THROWSENSE_ERROR(Diverged);

// intent / prior
THROWSENSE_ERROR(EmptyScope);
THROWSENSE_ERROR(RowMissing);

// evaluation
THROWSENSE_ERROR(InsufficientData);
THROWSENSE_ERROR(MissingClass);
THROWSENSE_ERROR(EmptyMatrix);

// synthetic generator
THROWSENSE_ERROR(Unreachable);

#undef THROWSENSE_ERROR

} // namespace throwsense
