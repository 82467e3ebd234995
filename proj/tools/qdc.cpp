// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "qdc_cli/app.hpp"

int main(int argc, char** argv) { return qdc::cli::run_cli(argc, argv, std::cout, std::cerr); }
