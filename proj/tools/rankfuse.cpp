#include <iostream>
#include <string>
#include <vector>

#include "rankfuse/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rankfuse::run_command(args, std::cout, std::cerr);
}
