#include "bergman/cli.hpp"

int main(int argc, char** argv) { return bergman::run_cli(argc, argv); }
