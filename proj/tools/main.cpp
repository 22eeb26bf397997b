#include "cli.hpp"

int main(int argc, char** argv) { return hfree::cli::cli_main(argc, argv); }
