#include "vcdm/cli.hpp"

int main(int argc, char** argv) { return vcdm::run_cli(argc, argv); }
