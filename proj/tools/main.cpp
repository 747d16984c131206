// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include <iostream>

#include "cli.hpp"

int main(int argc, char **argv) { return lidar_odom::cli::run(argc, argv, std::cout, std::cerr); }
