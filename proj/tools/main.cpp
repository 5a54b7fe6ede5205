#include <iostream>

#include "shardsim/cli.hpp"

int main(int argc, char** argv) {
  return shardsim::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
