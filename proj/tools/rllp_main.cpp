#include "rllp/cli.hpp"

int main(int argc, char** argv) { return rllp::cli::main(argc, argv); }
