#pragma once

#include <stdexcept>
#include <string>

namespace threadloom {

// Every failure surfaced by the library is one of these. The kind decides the
// CLI exit status.
enum class ErrorKind {
  usage,      // bad arguments or configuration
  data,       // malformed or inconsistent input
  transport,  // external scorer unreachable or broke the protocol
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::usage, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::data, what);
}

}  // namespace threadloom
