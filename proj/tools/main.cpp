#include <iostream>
#include <string>
#include <vector>

#include "spshare/cli.hpp"

int main(int argc, char** argv) {
  return spshare::run_cli(std::vector<std::string>(argv + 1, argv + argc),
                          std::cout, std::cerr);
}
