// main.cpp — wgheat command-line entry point

#include <iostream>

#include "wgheat/cli.hpp"

int main(int argc, char** argv) { return wgheat::cli::run(argc, argv, std::cout, std::cerr); }
