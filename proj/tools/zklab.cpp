#include "zklab/cli.hpp"

int main(int argc, char** argv) { return zklab::cli::main(argc, argv); }
