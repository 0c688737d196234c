#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return rcw::cli::run(argc, argv, std::cout, std::cerr); }
