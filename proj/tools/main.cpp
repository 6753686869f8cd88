#include <iostream>

#include "fhn/cli/app.hpp"

int main(int argc, char** argv) {
  return fhn::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
