#include <iostream>

#include "wikicite/cli.hpp"

int main(int argc, char** argv) { return wikicite::run_cli(argc, argv, std::cout, std::cerr); }
