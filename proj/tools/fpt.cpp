#include "fpt/cli_io.hpp"

int main(int argc, char** argv) { return fpt::cli_main(argc, argv); }
