#include "sweptnet/cli.hpp"

int main(int argc, char** argv) { return sweptnet::cli_main(argc, argv); }
