#include <credit/cli.hpp>

int main(int argc, char** argv) {
    return credit::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
