#include <iostream>

#include "clentropy/cli.hpp"

int main(int argc, char** argv) { return clentropy::cli::run(argc, argv, std::cout, std::cerr); }
