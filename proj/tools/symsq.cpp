#include "symsq/cli.hpp"

int main(int argc, char** argv) { return symsq::run_cli(argc, argv); }
