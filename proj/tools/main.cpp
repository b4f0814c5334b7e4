#include "evlander/cli.hpp"

int main(int argc, char** argv) { return evlander::run_cli(argc, argv); }
