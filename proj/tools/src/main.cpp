// SPDX-License-Identifier: Apache-2.0

#include "itcm_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return itcm::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
