#include <iostream>

#include "explab/cli.hpp"

int main(int argc, char** argv) { return explab::run_cli(argc, argv, std::cout, std::cerr); }
