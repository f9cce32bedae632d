#include "creepdiv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return creepdiv::run_cli(argc, argv, std::cout, std::cerr); }
