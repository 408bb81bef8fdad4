#pragma once

#include <stdexcept>
#include <string>

namespace mvdmm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed bytes in an input file (truncation, bad magic, bad header).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed bytes describing an unsupported or inconsistent layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition (shapes, lengths, windows).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Train/test split problems: missing classes, overlapping partitions, empty sides.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// An object was used before it reached the required state (e.g. untrained plan).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Data has no variance to decompose.
class RankError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvdmm
