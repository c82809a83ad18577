#include "sigmalab/cli.hpp"

int main(int argc, char** argv) { return sigmalab::cli::main(argc, argv); }
