#include "infmmala/cli.hpp"

int main(int argc, char** argv) { return infmmala::cli_main(argc, argv); }
