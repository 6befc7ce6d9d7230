#include "meraclust/cli.hpp"

int main(int argc, char** argv) { return meraclust::io::run_cli(argc, argv); }
