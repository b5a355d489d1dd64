#include <iostream>

#include "lfc/commands.h"

int main(int argc, char** argv) {
  return lfc::RunCli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
