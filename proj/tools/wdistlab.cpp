#include <iostream>

#include "wdistlab/cli.hpp"

int main(int argc, char** argv) { return wdistlab::cli_main(argc, argv, std::cout, std::cerr); }
