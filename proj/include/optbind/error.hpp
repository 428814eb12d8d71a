#pragma once

#include <stdexcept>
#include <string>

namespace optbind {

// Broad failure families; the CLI maps them onto exit codes.
enum class ErrorKind { Usage, Data, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::Data, what}; }
inline Error internal_error(const std::string& what) { return {ErrorKind::Internal, what}; }

}  // namespace optbind
