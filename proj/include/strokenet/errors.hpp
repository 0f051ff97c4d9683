// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace strokenet {

// Missing or malformed input file (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint or config does not match what the caller expects (exit code 3).
class ConfigMismatch : public std::runtime_error {
 public:
  ConfigMismatch(const std::string& field, const std::string& detail)
      : std::runtime_error("config mismatch on '" + field + "': " + detail), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Prediction and ground-truth files cannot be paired (exit code 4).
class PairingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace strokenet
