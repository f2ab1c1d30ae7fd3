#include <iostream>
#include <string>
#include <vector>

#include "bitforensics/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bitforensics::cli::run(args, std::cout, std::cerr);
}
