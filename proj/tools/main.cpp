#include <iostream>

#include "coedit/cli.hpp"

int main(int argc, char** argv) {
  return coedit::cli::run(argc, argv, std::cout, std::cerr);
}
