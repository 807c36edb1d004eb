#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return infomenu::cli::run(argc, argv, std::cout, std::cerr); }
