#include "mirs/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return mirs::run_cli(args, std::cout, std::cerr);
}
