#include "qwc/cli.hpp"

int main(int argc, char** argv) {
    return qwc::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
