#include <iostream>

#include "provabs/cli.h"

int main(int argc, char** argv) { return provabs::run_cli(argc, argv, std::cout, std::cerr); }
