#include <iostream>

#include "econloop/gateway/cli.hpp"

int main(int argc, char** argv) { return econloop::gateway::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
