#include "hhrp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hhrp::cli::run(argc, argv, std::cout, std::cerr); }
