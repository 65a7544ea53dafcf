#include <iostream>
#include <string>
#include <vector>

#include "interleave_lab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ilab::run_cli(args, std::cout, std::cerr);
}
