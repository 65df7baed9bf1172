// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pse {

// Error with a short machine-parsable code plus a human-readable message.
// The CLI renders these as "error: <code>: <message>" on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(std::move(code), message);
}

inline void check(bool ok, const char* code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace pse
