#include "ribound/cli.hpp"

int main(int argc, char** argv) { return ribound::run_cli(argc, argv); }
