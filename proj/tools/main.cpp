#include "picplace/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return picplace::run_cli(argc, argv, std::cout, std::cerr); }
