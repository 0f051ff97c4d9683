// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit codes: 0 success, 1 training diverged or
// internal error, 2 missing or malformed input, 3 config/checkpoint mismatch,
// 4 evaluation files cannot be paired.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strokenet::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kMismatch = 3, kPairing = 4 };

// argv[0] is the program name. Results go to `out` unless --out is given;
// progress, warnings and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strokenet::cli
