#include "xmds/cli.hpp"

int main(int argc, char** argv) { return xmds::run_cli(argc, argv); }
