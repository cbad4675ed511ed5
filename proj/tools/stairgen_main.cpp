#include <iostream>

#include "stairgen/cli.hpp"

int main(int argc, char** argv) {
  return stairgen::run_cli(argc, argv, std::cout, std::cerr);
}
