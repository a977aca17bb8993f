#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpt {

/// Failure categories shared by every module. Each maps to a distinct CLI
/// exit code.
enum class ErrorKind {
  precondition,
  divergence,
  series_divergence,
  unsupported_sampler,
  infeasible_truncation,
  no_crossing,
  certificate_infeasible,
  coverage,
  indeterminate,
  domain_escape,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status used by the command line tool for `kind`.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::precondition, what);
}

}  // namespace fpt
