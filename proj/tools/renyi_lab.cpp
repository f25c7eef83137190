#include "renyi/cli.hpp"

int main(int argc, char** argv) { return renyi::cli::run(argc, argv); }
