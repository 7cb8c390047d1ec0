#include "rcgan/cli.hpp"

int main(int argc, char** argv) { return rcgan::cli::run(argc, argv); }
