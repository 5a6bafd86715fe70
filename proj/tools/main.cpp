#include "sspif/cli.hpp"

int main(int argc, char** argv) { return sspif::cli_main(argc, argv); }
