#include <string>
#include <vector>

#include "waveguide/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wg::cli::run(args);
}
