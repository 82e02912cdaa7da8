#include <iostream>
#include <string>
#include <vector>

#include "peloton/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return peloton::run_cli(args, std::cout, std::cerr);
}
