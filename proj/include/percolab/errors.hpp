#pragma once

#include <stdexcept>
#include <string>

namespace percolab {

// Base for every error raised by the library. `category()` is the stable,
// machine-readable tag the CLI reports on stderr.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept = 0;
};

#define PERCOLAB_DEFINE_ERROR(Name, tag)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    using Error::Error;                                                   \
    const char* category() const noexcept override { return tag; }        \
  };

PERCOLAB_DEFINE_ERROR(ParameterError, "parameter")
PERCOLAB_DEFINE_ERROR(ArgumentError, "argument")
PERCOLAB_DEFINE_ERROR(SizeError, "size")
PERCOLAB_DEFINE_ERROR(StateError, "state")
PERCOLAB_DEFINE_ERROR(FitError, "fit")
PERCOLAB_DEFINE_ERROR(FormatError, "format")

#undef PERCOLAB_DEFINE_ERROR

}  // namespace percolab
