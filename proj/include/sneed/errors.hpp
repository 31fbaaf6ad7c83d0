#pragma once

#include <stdexcept>
#include <string>

namespace sneed {

/// Base class for every error this library throws.
class SneedError : public std::runtime_error {
public:
  explicit SneedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two field elements from different fields were combined.
class FieldMismatchError : public SneedError {
public:
  explicit FieldMismatchError(const std::string& msg) : SneedError(msg) {}
};

/// Invalid field parameters: bad degree, reducible polynomial, or a
/// generator whose multiplicative order is not q-1.
class FieldConstructionError : public SneedError {
public:
  explicit FieldConstructionError(const std::string& msg) : SneedError(msg) {}
};

/// Element value outside [0, q).
class FieldRangeError : public SneedError {
public:
  explicit FieldRangeError(const std::string& msg) : SneedError(msg) {}
};

class DivisionByZeroError : public SneedError {
public:
  explicit DivisionByZeroError(const std::string& msg) : SneedError(msg) {}
};

class SingularMatrixError : public SneedError {
public:
  explicit SingularMatrixError(const std::string& msg) : SneedError(msg) {}
};

/// Shape or length mismatch in a matrix/vector operation.
class DimensionError : public SneedError {
public:
  explicit DimensionError(const std::string& msg) : SneedError(msg) {}
};

/// The field has too few elements for the requested code length.
class FieldTooSmallError : public SneedError {
public:
  explicit FieldTooSmallError(const std::string& msg) : SneedError(msg) {}
};

/// Codeword enumeration would exceed the supported search space.
class EnumerationTooLargeError : public SneedError {
public:
  explicit EnumerationTooLargeError(const std::string& msg) : SneedError(msg) {}
};

class NotFoundError : public SneedError {
public:
  explicit NotFoundError(const std::string& msg) : SneedError(msg) {}
};

/// Catalog row whose construction the library does not provide.
class UnsupportedEntryError : public SneedError {
public:
  explicit UnsupportedEntryError(const std::string& msg) : SneedError(msg) {}
};

/// The surviving channels cannot determine the message. When the erasure
/// pattern was already larger than d-1 the error carries that fact.
class UnrecoverablePatternError : public SneedError {
public:
  UnrecoverablePatternError(const std::string& msg, bool capability_exceeded)
      : SneedError(msg), capability_exceeded_(capability_exceeded) {}
  bool capability_exceeded() const { return capability_exceeded_; }

private:
  bool capability_exceeded_;
};

/// Packet bytes rejected by the wire-format parser or validator.
class MalformedPacketError : public SneedError {
public:
  enum class Kind {
    BadMagic,
    BadVersion,
    BadKind,
    Truncated,
    LengthMismatch,
    FieldRange,
    TrailingBytes,
    MissingDigest,
  };

  MalformedPacketError(Kind kind, const std::string& msg)
      : SneedError(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

class MissingKeyError : public SneedError {
public:
  explicit MissingKeyError(const std::string& msg) : SneedError(msg) {}
};

class ConfigError : public SneedError {
public:
  explicit ConfigError(const std::string& msg) : SneedError(msg) {}
};

class IoError : public SneedError {
public:
  explicit IoError(const std::string& msg) : SneedError(msg) {}
};

class InsufficientShardsError : public SneedError {
public:
  explicit InsufficientShardsError(const std::string& msg) : SneedError(msg) {}
};

}  // namespace sneed
