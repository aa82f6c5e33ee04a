#include <iostream>
#include <string>
#include <vector>

#include "ringwalk/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return ringwalk::cli::run(args, std::cout, std::cerr);
}
