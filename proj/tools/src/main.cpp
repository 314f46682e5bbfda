#include <iostream>

#include "grj/cli/commands.hpp"

int main(int argc, char** argv) { return grj::cli::run_cli(argc, argv, std::cout, std::cerr); }
