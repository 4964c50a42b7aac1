#include <opmean/cli.hpp>

int main(int argc, char** argv) { return opmean::cli::main(argc, argv); }
