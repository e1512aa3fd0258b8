#include "sigrecover/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sigrecover::cli::run(argc, argv, std::cout, std::cerr); }
