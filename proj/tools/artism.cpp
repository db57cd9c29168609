#include <iostream>

#include "artism/cli.hpp"

int main(int argc, char** argv) { return artism::cli::main(argc, argv, std::cout, std::cerr); }
