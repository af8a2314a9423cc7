#include <iostream>

#include "stepviz/cli.hpp"

int main(int argc, char** argv) { return stepviz::cli::run_cli(argc, argv, std::cout, std::cerr); }
