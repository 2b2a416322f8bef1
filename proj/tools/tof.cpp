#include <iostream>

#include "tof/cli.hpp"

int main(int argc, char** argv) { return tof::run_cli(argc, argv, std::cout, std::cerr); }
