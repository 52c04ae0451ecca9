#include <iostream>

#include "atb/cli.hpp"

int main(int argc, char** argv) { return atb::run_cli(argc, argv, std::cout, std::cerr); }
