#include <iostream>

#include "ouspec/cli.hpp"

int main(int argc, char** argv) {
  return ou::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
