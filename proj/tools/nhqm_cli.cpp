#include "nhqm/cli.hpp"

int main(int argc, char** argv) { return nhqm::run_cli(argc, argv); }
