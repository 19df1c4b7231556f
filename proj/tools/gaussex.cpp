#include "gaussex/cli.hpp"

int main(int argc, char** argv) { return gaussex::run_cli(argc, argv); }
