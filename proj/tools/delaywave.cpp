#include <iostream>

#include "delaywave/cli.hpp"

int main(int argc, char** argv) { return delaywave::run_cli(argc, argv, std::cout, std::cerr); }
