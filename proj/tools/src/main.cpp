#include <iostream>

#include "polarsim/cli.hpp"

int main(int argc, char** argv) { return polarsim::cli::dispatch(argc, argv, std::cout, std::cerr); }
