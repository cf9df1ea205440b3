#include <iostream>
#include <string>
#include <vector>

#include "pwcc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pwcc::cli::run(args, std::cout, std::cerr);
}
