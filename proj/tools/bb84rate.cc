#include <iostream>

#include "bb84/cli.h"

int main(int argc, char **argv) { return bb84::run_cli(argc, argv, std::cout, std::cerr); }
