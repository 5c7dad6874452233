#include "embias/cli.hpp"

int main(int argc, char** argv) { return embias::cli::main(argc, argv); }
