#include "pbf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pbf::run_cli(argc, argv, std::cout, std::cerr); }
