#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "prational/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    prational::cli::Environment env;
    env.color = isatty(STDOUT_FILENO) && std::getenv("NO_COLOR") == nullptr;
    return prational::cli::run(std::move(args), std::cout, std::cerr, env);
}
