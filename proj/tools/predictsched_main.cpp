#include <iostream>
#include <string>
#include <vector>

#include "predictsched/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return predictsched::run_cli(args, std::cout, std::cerr);
}
