#include <vector>

#include "qvm/cli.hpp"

int main(int argc, char** argv) {
    return qvm::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
