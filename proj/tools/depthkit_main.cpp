#include <iostream>

#include "depthkit/cli.hpp"

int main(int argc, char** argv) {
  return depthkit::run_cli(argc, argv, std::cout, std::cerr);
}
