#include <iostream>

#include "phaseslide/cli.hpp"

int main(int argc, char** argv) { return phaseslide::cli_main(argc, argv, std::cout, std::cerr); }
