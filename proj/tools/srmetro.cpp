#include <iostream>

#include "srmetro/cli/app.hpp"

int main(int argc, char** argv) { return srmetro::cli::run_cli(argc, argv, std::cout, std::cerr); }
