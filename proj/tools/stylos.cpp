#include <iostream>

#include "stylos/cli.hpp"

int main(int argc, char** argv) { return stylos::cli::run(argc, argv, std::cout, std::cerr); }
