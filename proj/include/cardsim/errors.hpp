// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace cardsim {

/// Base class for every error raised by the simulator core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index (cut layer, device, round) fell outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a documented invariant. The message carries the
/// offending field path when the input came from a file.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The scenario has no feasible server frequency for some device, i.e. the
/// device-dependent lower bound exceeds the server's maximum frequency.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A link with zero rate was asked to carry a nonzero payload.
class LinkOutage : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cardsim
