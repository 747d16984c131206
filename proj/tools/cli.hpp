// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <iosfwd>

namespace lidar_odom::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,   // unreadable input, processing error, bad data
    kUsage = 2,     // bad command line
    kNoInput = 3,   // the input resolved to zero frames
};

/// Entry point of the `lidar_odom` tool; argv[0] is the program name.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace lidar_odom::cli
