#pragma once

#include <stdexcept>
#include <string>

namespace funkslice {

enum class ErrorKind {
  Domain,
  Singularity,
  EmptySection,
  Pole,
  InvalidPlane,
  Accuracy,
  Extrapolation,
  Unsupported,
  Config,
  Io,
};

/// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define FUNKSLICE_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

FUNKSLICE_DEFINE_ERROR(DomainError, Domain)
FUNKSLICE_DEFINE_ERROR(SingularityError, Singularity)
FUNKSLICE_DEFINE_ERROR(EmptySectionError, EmptySection)
FUNKSLICE_DEFINE_ERROR(PoleError, Pole)
FUNKSLICE_DEFINE_ERROR(InvalidPlaneError, InvalidPlane)
FUNKSLICE_DEFINE_ERROR(AccuracyError, Accuracy)
FUNKSLICE_DEFINE_ERROR(ExtrapolationError, Extrapolation)
FUNKSLICE_DEFINE_ERROR(UnsupportedError, Unsupported)
FUNKSLICE_DEFINE_ERROR(ConfigError, Config)
FUNKSLICE_DEFINE_ERROR(IoError, Io)

#undef FUNKSLICE_DEFINE_ERROR

}  // namespace funkslice
