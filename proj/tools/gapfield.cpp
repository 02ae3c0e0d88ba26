#include "gapfield/cli.hpp"

int main(int argc, char** argv) { return gapfield::cli::run(argc, argv); }
