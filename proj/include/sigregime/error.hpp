#pragma once

#include <stdexcept>
#include <string>

namespace sigregime {

enum class ErrorKind {
  Argument,
  Shape,
  Domain,
  Range,
  Capacity,
  Numeric,
  Degenerate,
  Config,
  Ingestion,
  Format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* kind_name(ErrorKind kind);

// Process exit status: 2 config/argument, 3 data, 4 numeric.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace sigregime
