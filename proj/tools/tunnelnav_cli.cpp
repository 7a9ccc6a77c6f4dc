#include <iostream>

#include "tunnelnav/cli.hpp"

int main(int argc, char** argv) { return tunnelnav::run_cli(argc, argv, std::cout, std::cerr); }
