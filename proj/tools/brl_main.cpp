#include <iostream>

#include "brl/harness/cli.hpp"

int main(int argc, char** argv) { return brl::cli_dispatch(argc, argv, std::cout, std::cerr); }
