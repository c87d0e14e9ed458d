// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace superlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad epsilon, missing bounds, unknown keys, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model is outside what an oracle can evaluate (e.g. spatially varying alpha).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// No closed-form eigendata is registered for the model.
class NoSpectralDataError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or ODE result violated a sanity bound.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace superlab
