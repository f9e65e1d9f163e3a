#include <iostream>

#include "viewstack/cli.hpp"

int main(int argc, char** argv) {
  return viewstack::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
