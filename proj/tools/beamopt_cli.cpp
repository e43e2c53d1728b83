#include "beamopt/cli.hpp"

int main(int argc, char** argv) { return beamopt::cli::run(argc, argv); }
