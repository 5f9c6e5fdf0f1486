#include "spreadlab/cli.hpp"

int main(int argc, char** argv) { return spreadlab::run_cli(argc, argv); }
