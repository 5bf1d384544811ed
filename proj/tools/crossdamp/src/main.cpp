#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return cdtool::main_cli(argc, argv, std::cout, std::cerr); }
