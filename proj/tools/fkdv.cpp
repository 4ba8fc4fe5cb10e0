#include <iostream>

#include "fkdv/cli.hpp"

int main(int argc, char** argv) { return fkdv::cli::run(argc, argv, std::cout, std::cerr); }
