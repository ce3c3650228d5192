#pragma once

#include <stdexcept>
#include <string>

namespace rcv {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a precondition (bad sizes, out-of-range codes, mixed groups).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A zero-knowledge proof or integrity check failed. `party` names the
/// culprit teller index when one can be identified, 0 otherwise.
class ProofError : public Error {
 public:
  explicit ProofError(const std::string& what, int party = 0) : Error(what), party_(party) {}
  int party() const noexcept { return party_; }

 private:
  int party_;
};

/// A decrypted plaintext does not decompose over the expected prime table.
class MalformedPlaintext : public Error {
 public:
  using Error::Error;
};

/// Illegal transition in one of the protocol state machines.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Parse failure on persisted data (board file, config, state).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcv
