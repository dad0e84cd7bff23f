#pragma once

#include <stdexcept>
#include <string>

namespace rgym {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, detected before any episode runs.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what), detail_(what) {}
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key), detail_(what) {}

  const std::string& key() const noexcept { return key_; }
  // Message without the key prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string key_;
  std::string detail_;
};

// A value lies outside the space or domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Unknown environment parameter name.
class UnknownParameterError : public DomainError {
 public:
  explicit UnknownParameterError(const std::string& name)
      : DomainError("unknown environment parameter '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Non-finite state or action inside an environment.
class EnvironmentFault : public Error {
 public:
  using Error::Error;
};

// An adversary failed to produce a usable reply.
class AdversaryError : public Error {
 public:
  AdversaryError(const std::string& adversary_id, const std::string& what)
      : Error("adversary '" + adversary_id + "': " + what), adversary_id_(adversary_id) {}

  const std::string& adversary_id() const noexcept { return adversary_id_; }

 private:
  std::string adversary_id_;
};

}  // namespace rgym
