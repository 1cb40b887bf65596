#include <iostream>
#include <string>
#include <vector>

#include "msid/cli.hpp"

int main(int argc, char** argv) {
    return msid::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
