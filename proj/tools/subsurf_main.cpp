#include <vector>

#include "subsurf/cli.hpp"

int main(int argc, char** argv) {
    return subsurf::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
