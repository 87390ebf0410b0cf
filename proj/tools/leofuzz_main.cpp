#include "leofuzz/cli.hpp"

int main(int argc, char** argv) { return leofuzz::run_cli(argc, argv); }
