#include "fusedhs/cli.hpp"

int main(int argc, char** argv) { return fusedhs::cli_main(argc, argv); }
