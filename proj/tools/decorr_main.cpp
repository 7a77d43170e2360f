/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return decorr::run_cli(args, std::cout, std::cerr);
}
