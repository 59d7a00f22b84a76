// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "tsa_cli/commands.hpp"

int main(int argc, char** argv) { return tsa::cli::run(argc, argv, std::cout, std::cerr); }
