#include <iostream>

#include "falsifier/cli.hpp"

int main(int argc, char** argv) { return falsifier::run_cli(argc, argv, std::cout, std::cerr); }
