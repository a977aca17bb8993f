#include "fpt/error.hpp"

namespace fpt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::series_divergence: return "series_divergence";
    case ErrorKind::unsupported_sampler: return "unsupported_sampler";
    case ErrorKind::infeasible_truncation: return "infeasible_truncation";
    case ErrorKind::no_crossing: return "no_crossing";
    case ErrorKind::certificate_infeasible: return "certificate_infeasible";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::indeterminate: return "indeterminate";
    case ErrorKind::domain_escape: return "domain_escape";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::precondition: return 3;
    case ErrorKind::divergence: return 4;
    case ErrorKind::no_crossing: return 5;
    case ErrorKind::certificate_infeasible: return 6;
    case ErrorKind::series_divergence: return 7;
    case ErrorKind::coverage: return 8;
    case ErrorKind::unsupported_sampler: return 9;
    case ErrorKind::indeterminate: return 10;
    case ErrorKind::infeasible_truncation: return 11;
    case ErrorKind::domain_escape: return 12;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fpt
