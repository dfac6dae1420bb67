#pragma once

#include <stdexcept>
#include <string>

namespace enfish {

// Error taxonomy shared by the whole library. The CLI maps these
// one-to-one onto exit codes, so every failure path below carries a
// stable machine-readable code name.
enum class errc {
  validation,    // bad parameters or malformed input
  solver,        // a numerical routine failed to converge / bracket
  unattainable,  // requested catch below what enforcement can induce
  kink,          // derivative requested across a regime switch
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::validation: return "validation";
    case errc::solver: return "solver";
    case errc::unattainable: return "unattainable";
    case errc::kink: return "kink";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

class validation_error : public error {
 public:
  explicit validation_error(const std::string& msg) : error(errc::validation, msg) {}
};

class solver_error : public error {
 public:
  explicit solver_error(const std::string& msg) : error(errc::solver, msg) {}
};

// Thrown when a catch target lies below the infimum of the aggregate
// catch function: the bounded penalty cannot deter that much fishing
// even as detection approaches certainty. Carries the infimum so
// callers can report how close the target was.
class unattainable_error : public error {
 public:
  unattainable_error(const std::string& msg, double attainable_infimum)
      : error(errc::unattainable, msg), infimum_(attainable_infimum) {}
  double attainable_infimum() const noexcept { return infimum_; }

 private:
  double infimum_;
};

class kink_error : public error {
 public:
  explicit kink_error(const std::string& msg) : error(errc::kink, msg) {}
};

}  // namespace enfish
