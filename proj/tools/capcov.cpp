#include <iostream>

#include "capcov/cli.hpp"

int main(int argc, char** argv) {
  return capcov::run_cli(argc, argv, std::cout, std::cerr);
}
