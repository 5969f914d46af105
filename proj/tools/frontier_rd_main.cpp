#include <iostream>
#include <string>
#include <vector>

#include "frontier_rd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return frontier_rd::cli::run(args, std::cout, std::cerr);
}
