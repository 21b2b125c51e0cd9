#include "semirandom/cli.hpp"

int main(int argc, char** argv) { return semirandom::cli::run(argc, argv); }
