#include "rankone/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rankone::cli::run(argc, argv, std::cout, std::cerr); }
