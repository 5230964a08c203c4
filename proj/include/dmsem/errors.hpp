#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dmsem {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, usage = 1, data = 2, numeric = 3 };

/// Base of every library error; carries the exit code the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

/// Malformed input files, schema violations, I/O failures, missing words.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

/// Non-finite values, non-PSD input, vanishing traces.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ExitCode::numeric, what) {}
};

/// Operator and argument have (numerically) disjoint support, so the
/// composed matrix has no trace left to normalize.
class DegenerateComposition : public NumericError {
 public:
  explicit DegenerateComposition(const std::string& what) : NumericError(what) {}
};

/// One or more lemmas are missing from a word store.
class OovError : public DataError {
 public:
  explicit OovError(std::vector<std::string> lemmas)
      : DataError(message(lemmas)), lemmas_(std::move(lemmas)) {}

  const std::vector<std::string>& lemmas() const noexcept { return lemmas_; }

 private:
  static std::string message(const std::vector<std::string>& lemmas) {
    std::string m = "out-of-vocabulary:";
    for (const auto& l : lemmas) m += " " + l;
    return m;
  }
  std::vector<std::string> lemmas_;
};

}  // namespace dmsem
