#include <iostream>

#include "srcloc/cli.hpp"

int main(int argc, char** argv) {
    return srcloc::cli_main(argc, argv, std::cout, std::cerr);
}
