#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return radsum::cli::run(argc, argv, std::cerr); }
