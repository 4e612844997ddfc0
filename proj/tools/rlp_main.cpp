#include <vector>

#include "rlp/dispatch.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rlp::dispatch(args);
}
