#include <string>
#include <vector>

#include "greydea/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return greydea::run_cli(args);
}
