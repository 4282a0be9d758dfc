#include <iostream>

#include "hptm/cli.hpp"

int main(int argc, char** argv) {
    return hptm::cli::run(argc, argv, std::cout, std::cerr);
}
