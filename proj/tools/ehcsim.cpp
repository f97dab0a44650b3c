#include <iostream>
#include <string>
#include <vector>

#include "ehc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ehc::run_cli(args, std::cout, std::cerr);
}
