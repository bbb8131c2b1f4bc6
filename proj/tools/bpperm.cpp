#include <iostream>

#include "bpperm/commands.hpp"

int main(int argc, char** argv) { return bpperm::run_cli(argc, argv, std::cout, std::cerr); }
