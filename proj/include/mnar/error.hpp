#pragma once

#include <stdexcept>
#include <string>

namespace mnar {

enum class Errc {
  contract,
  data_inconsistency,
  rejected_record,
  degenerate_estimator,
  estimator_failed,
  solver_stalled,
  io,
  config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::contract: return "contract";
    case Errc::data_inconsistency: return "data_inconsistency";
    case Errc::rejected_record: return "rejected_record";
    case Errc::degenerate_estimator: return "degenerate_estimator";
    case Errc::estimator_failed: return "estimator_failed";
    case Errc::solver_stalled: return "solver_stalled";
    case Errc::io: return "io";
    case Errc::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace mnar
