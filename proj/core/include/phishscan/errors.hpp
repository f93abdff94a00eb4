#pragma once

#include <stdexcept>
#include <string>

namespace phishscan {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (hex, decimals, JSON records).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Missing or unreadable configuration and registry files.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Inputs that parse but violate a documented invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

class NotFoundError : public Error {
public:
  using Error::Error;
};

/// Network or I/O failure that may succeed on retry.
class TransportError : public Error {
public:
  using Error::Error;
};

/// The provider cannot serve the requested historical state.
class UnavailableError : public Error {
public:
  using Error::Error;
};

/// No price is known for the asset at the requested block.
class UnpriceableError : public Error {
public:
  using Error::Error;
};

/// History append out of block order.
class SequencingError : public Error {
public:
  using Error::Error;
};

class DecodeError : public Error {
public:
  using Error::Error;
};

}  // namespace phishscan
