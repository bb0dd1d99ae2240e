#pragma once

#include <stdexcept>
#include <string>

namespace graspkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The skeleton's anchor joints do not span a usable frame.
class DegenerateHand : public Error {
 public:
  using Error::Error;
};

/// Tracking dropped out for longer than the allowed gap.
class HandLost : public Error {
 public:
  using Error::Error;
};

/// A stateful value was driven outside its allowed transitions.
class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A frame arrived that the running protocol cannot accept.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace graspkit
