#include "ttutv/cli.hpp"

int main(int argc, char** argv) { return ttutv::cli_main(argc, argv); }
