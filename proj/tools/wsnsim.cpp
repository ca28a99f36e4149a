#include <iostream>

#include "wsnsim_cli.hpp"

int main(int argc, char** argv) {
  return wsnres::cli::cli_main(argc, argv, std::cout, std::cerr);
}
