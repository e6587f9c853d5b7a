#include "qad/cli.hpp"

int main(int argc, char** argv) { return qad::cli::main(argc, argv); }
