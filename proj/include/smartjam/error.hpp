#pragma once

#include <stdexcept>
#include <string>

namespace smartjam {

enum class ErrorKind {
  RankDeficient,
  Shape,
  InvalidArgument,
  InvalidJammer,
  Parse,
  Config,
  TooLarge,
  Runtime,
};

/// Single exception type for the library; `kind()` distinguishes failure classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace smartjam
