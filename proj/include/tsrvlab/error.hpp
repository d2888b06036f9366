#pragma once

#include <stdexcept>
#include <string>

namespace tsrv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Process model violates its invariants (sigma <= 0, non-finite values, ...).
class ModelError : public Error
{
public:
  using Error::Error;
};

/// Requested size exceeds what the index type or the generator can address.
class CapacityError : public Error
{
public:
  using Error::Error;
};

/// Argument outside the operation's domain.
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Operation is undefined for the given contamination kernel or model.
class UnsupportedError : public Error
{
public:
  using Error::Error;
};

/// Configuration is malformed or violates an invariant. The message names the field.
class ConfigError : public Error
{
public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field))
  {
  }
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Input data (tick files) is malformed.
class DataError : public Error
{
public:
  using Error::Error;
};

/// File system failure; the message carries the path.
class IoError : public Error
{
public:
  using Error::Error;
};

} // namespace tsrv
