#include <iostream>

#include "hfspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hfspec::run_cli(args, std::cout, std::cerr);
}
