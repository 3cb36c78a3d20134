#pragma once

#include <stdexcept>
#include <string>

namespace unrest {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define UNREST_DEFINE_ERROR(Name)                 \
    class Name : public Error {                   \
    public:                                       \
        explicit Name(const std::string& what)    \
            : Error(#Name ": " + what) {}         \
    }

UNREST_DEFINE_ERROR(CorruptArchive);
UNREST_DEFINE_ERROR(ChecksumMismatch);
UNREST_DEFINE_ERROR(StoreWriteFailure);
UNREST_DEFINE_ERROR(InvalidSpec);
UNREST_DEFINE_ERROR(InsufficientHistory);
UNREST_DEFINE_ERROR(DimensionMismatch);
UNREST_DEFINE_ERROR(LengthMismatch);
UNREST_DEFINE_ERROR(EmptyInput);
UNREST_DEFINE_ERROR(EmptySet);
UNREST_DEFINE_ERROR(HorizonExceedsMaxLag);
UNREST_DEFINE_ERROR(UnknownKey);
UNREST_DEFINE_ERROR(InvalidValue);
UNREST_DEFINE_ERROR(MissingFile);
UNREST_DEFINE_ERROR(FormatError);
UNREST_DEFINE_ERROR(FetchError);

#undef UNREST_DEFINE_ERROR

/// Raised when a stage runs before the artifact it consumes exists.
class MissingPrerequisite : public Error {
public:
    MissingPrerequisite(std::string artifact, std::string produced_by)
        : Error("MissingPrerequisite: " + artifact + " (run stage '" + produced_by + "' first)"),
          artifact_(std::move(artifact)), produced_by_(std::move(produced_by)) {}

    const std::string& artifact() const noexcept { return artifact_; }
    const std::string& produced_by() const noexcept { return produced_by_; }

private:
    std::string artifact_;
    std::string produced_by_;
};

} // namespace unrest
