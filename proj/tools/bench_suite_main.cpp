#include "foe/cli.hpp"

int main(int argc, char** argv) { return foe::run_bench_suite(argc, argv); }
