#include <iostream>

#include "serialbench/cli.hpp"

int main(int argc, char** argv) {
  return serialbench::cli::run(argc, argv, std::cout, std::cerr);
}
