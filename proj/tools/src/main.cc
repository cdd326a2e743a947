#include <iostream>

#include "covgeom_cli/cli.h"

int main(int argc, char** argv) {
  return covgeom::cli::RunCli(argc, argv, std::cout, std::cerr);
}
