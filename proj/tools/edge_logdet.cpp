#include <iostream>
#include <string>
#include <vector>

#include "edgelogdet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return edgelogdet::cli::dispatch(std::move(args), std::cout, std::cerr);
}
