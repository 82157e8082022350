#include <iostream>

#include "qsmap_cli.hpp"

int main(int argc, char** argv) { return qsmap::cli::run_cli(argc, argv, std::cout, std::cerr); }
