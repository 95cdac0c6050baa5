#include "pmle/cli.hpp"

int main(int argc, char** argv) { return pmle::cli::run_cli(argc, argv); }
