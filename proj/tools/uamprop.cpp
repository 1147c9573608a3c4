#include <iostream>
#include <vector>

#include "uam/report.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uam::report::run_cli(args, std::cout, std::cerr);
}
