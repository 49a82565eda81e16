#include <iostream>

#include "aggfield/cli.hpp"

int main(int argc, char** argv) {
  return aggfield::run_cli(argc, argv, std::cout, std::cerr);
}
