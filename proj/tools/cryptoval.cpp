#include <iostream>

#include "cryptoval/commands.hpp"

int main(int argc, char** argv) {
    return cryptoval::cli::run_cli(argc, argv, std::cout, std::cerr);
}
