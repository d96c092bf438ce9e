#include <iostream>

#include "cvtag/cli.hpp"

int main(int argc, char** argv) {
    return cvtag::cli_main(argc, argv, std::cout, std::cerr);
}
