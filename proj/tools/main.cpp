#include <iostream>

#include "relax/cli.hpp"

int main(int argc, char** argv) {
    return relax::cli_main(argc, argv, std::cout, std::cerr);
}
