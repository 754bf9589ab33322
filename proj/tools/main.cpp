#include "relayopt/cli.hpp"

int main(int argc, char** argv) { return relayopt::cli_dispatch(argc, argv); }
