#include "dlm/bench/cli.hpp"

int main(int argc, char** argv) { return dlm::bench::run_cli(argc, argv); }
