#include <iostream>

#include "prequant/cli.hpp"

int main(int argc, char** argv) { return prequant::cli::main(argc, argv, std::cout, std::cerr); }
