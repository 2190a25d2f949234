#include <iostream>

#include "selfaffine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return selfaffine::cli::run(args, std::cout, std::cerr);
}
