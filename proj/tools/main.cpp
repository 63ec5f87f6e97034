#include <iostream>

#include "trf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trf::cli::run(args, std::cout, std::cerr);
}
