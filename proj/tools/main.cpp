#include <iostream>
#include <string>
#include <vector>

#include "cdsr/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return cdsr::cli::run(args, std::cout, std::cerr);
}
