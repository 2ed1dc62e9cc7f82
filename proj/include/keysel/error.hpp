#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace keysel {

enum class ErrorKind {
  kConfig,      // invalid parameters or unsatisfiable constraints
  kInput,       // bad files, bad ids, malformed data
  kEvaluation,  // a classifier evaluation could not produce a fitness
  kIo,          // output could not be written
  kInternal,    // broken invariant between components
};

// Process exit code used by the CLI for each error kind.
int exit_code(ErrorKind kind);
std::string_view kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return {ErrorKind::kConfig, msg}; }
inline Error input_error(const std::string& msg) { return {ErrorKind::kInput, msg}; }
inline Error eval_error(const std::string& msg) { return {ErrorKind::kEvaluation, msg}; }
inline Error io_error(const std::string& msg) { return {ErrorKind::kIo, msg}; }
inline Error internal_error(const std::string& msg) { return {ErrorKind::kInternal, msg}; }

}  // namespace keysel
