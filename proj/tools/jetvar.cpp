#include "jetvar/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return jetvar::cli::main_entry(argc, argv, std::cout, std::cerr);
}
