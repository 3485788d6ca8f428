#include "reasonsum/cli.hpp"

int main(int argc, char** argv) { return reasonsum::cli::main(argc, argv); }
