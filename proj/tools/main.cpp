#include "wfr/cli.hpp"

int main(int argc, char** argv) { return wfr::run_cli(argc, argv); }
