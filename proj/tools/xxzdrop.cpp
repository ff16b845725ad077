#include "xxzdrop/cli.hpp"

int main(int argc, char** argv) { return xxz::run_cli(argc, argv); }
