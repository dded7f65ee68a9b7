#include "helmholtz/cli_io.hpp"

#include <iostream>

int main(int argc, char** argv) { return helmholtz::cli::run(argc, argv, std::cout, std::cerr); }
