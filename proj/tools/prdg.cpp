#include "prdg/cli.hpp"

int main(int argc, char** argv) { return prdg::cli_main(argc, argv); }
