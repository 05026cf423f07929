#pragma once

#include <stdexcept>
#include <string>

namespace gridfft {

// Failure categories used across the library. Tests and callers match on the
// code; message text is for humans.
enum class Errc {
  IndexOutOfBounds,
  ShapeMismatch,
  InvalidPermutation,
  EmptyInput,
  InvalidMode,
  ParseError,
  SizeMismatch,
  InvalidRoot,
  DeadlockDetected,
  ProgramError,
  UnsupportedRedist,
  InvalidParams,
  UnsupportedAlgorithm,
  GridMismatch,
  UnsupportedCount,
  NoFeasibleConfiguration,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gridfft
