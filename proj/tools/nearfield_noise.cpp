// nearfield_noise.cpp — command-line entry point

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return nearfield::cli::run(args, std::cout, std::cerr);
}
