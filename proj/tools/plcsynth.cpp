#include <iostream>
#include <string>
#include <vector>

#include "plcsynth/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return plcsynth::run(args, std::cout, std::cerr);
}
