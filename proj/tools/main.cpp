#include <iostream>

#include "snqesa/cli.hpp"

int main(int argc, char** argv) { return snq::run_cli(argc, argv, std::cout, std::cerr); }
