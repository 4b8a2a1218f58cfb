#include <iostream>

#include "mka/commands.hpp"

int main(int argc, char** argv) {
    return mka::cli::run_cli(argc, argv, std::cout, std::cerr);
}
