// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace quasifree {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible domain (beta <= 0, k_f <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A momentum density or K matrix violates its positivity/boundedness constraint.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// A quadrature or truncation could not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A series or resolvent that only converges inside a region was asked to leave it.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds what an exact algorithm supports.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Sampler encountered a numerically inconsistent state.
class SamplerStateError : public Error {
 public:
  using Error::Error;
};

/// A computed value contradicts a bound that must hold (imaginary residue, Hadamard cap, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Discretization too coarse to keep a discretized spectrum inside its admissible interval.
class DiscretizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace quasifree
