#include <iostream>

#include "xclust/cli.hpp"

int main(int argc, char** argv) { return xclust::cli::run(argc, argv, std::cout, std::cerr); }
