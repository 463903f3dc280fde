#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stellar {

// Base of every error raised by the library. `kind()` is a stable name that
// the CLI maps to exit codes and that reports carry in per-row failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("ParseError", std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class MissingDeclaration : public Error {
 public:
  explicit MissingDeclaration(const std::string& name)
      : Error("MissingDeclaration", "no declaration for signal '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class PathExplosion : public Error {
 public:
  PathExplosion() : Error("PathExplosion", "execution path count exceeds 2^31") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what = "input text is empty") : Error("EmptyInput", what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("DimensionMismatch",
              "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyIndex : public Error {
 public:
  EmptyIndex() : Error("EmptyIndex", "index is empty") {}
};

class CorruptIndex : public Error {
 public:
  explicit CorruptIndex(const std::string& why) : Error("CorruptIndex", "corrupt index: " + why) {}
};

class VersionMismatch : public Error {
 public:
  VersionMismatch(unsigned found, unsigned expected)
      : Error("VersionMismatch", "index format version " + std::to_string(found) +
                                     " (expected " + std::to_string(expected) + ")") {}
};

class UnsatisfiableStratum : public Error {
 public:
  explicit UnsatisfiableStratum(const std::string& why) : Error("UnsatisfiableStratum", why) {}
};

class UnresolvedHit : public Error {
 public:
  explicit UnresolvedHit(const std::string& id)
      : Error("UnresolvedHit", "search hit '" + id + "' is not in the knowledge base"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyRankings : public Error {
 public:
  EmptyRankings() : Error("EmptyRankings", "no rankings to evaluate") {}
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("EmptyText", "text has no tokens") {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& why) : Error("InvalidArgument", why) {}
};

class TemplateError : public Error {
 public:
  explicit TemplateError(const std::string& why) : Error("TemplateError", why) {}
};

// Provider-side failures. The CLI exits with code 3 for anything derived
// from ProviderFailure.
class ProviderFailure : public Error {
 public:
  using Error::Error;
};

class AuthError : public ProviderFailure {
 public:
  explicit AuthError(const std::string& why) : ProviderFailure("AuthError", why) {}
};

class RateLimited : public ProviderFailure {
 public:
  explicit RateLimited(int attempts)
      : ProviderFailure("RateLimited",
                        "rate limited after " + std::to_string(attempts) + " attempts") {}
};

class Timeout : public ProviderFailure {
 public:
  explicit Timeout(const std::string& why) : ProviderFailure("Timeout", why) {}
};

class ProviderError : public ProviderFailure {
 public:
  ProviderError(int status, const std::string& excerpt)
      : ProviderFailure("ProviderError",
                        "provider returned status " + std::to_string(status) + ": " + excerpt),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace stellar
