#include <iostream>
#include <string>
#include <vector>

#include "bgi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bgi::run_cli(args, std::cout, std::cerr);
}
