#include <iostream>

#include "ulab/cli.hpp"

int main(int argc, char** argv) { return ulab::run_cli(argc, argv, std::cout, std::cerr); }
