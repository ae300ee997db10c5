#include <iostream>

#include "ces/cli.hpp"

int main(int argc, char** argv) {
  return ces::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
