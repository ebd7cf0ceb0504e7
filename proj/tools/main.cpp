#include "grassmin/cli.hpp"

int main(int argc, char** argv) { return grassmin::cli_main(argc, argv); }
