#include <iostream>
#include <string>
#include <vector>

#include "rgym/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rgym::cli::run(args, std::cin, std::cout, std::cerr);
}
