#include <string>
#include <vector>

#include "stepreg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stepreg::run_cli(args);
}
