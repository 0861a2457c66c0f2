#include "foe/cli.hpp"

int main(int argc, char** argv) { return foe::run_cli(argc, argv); }
