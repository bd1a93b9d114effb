#include "qoper/cli.hpp"

int main(int argc, char** argv) { return qoper::cli::main(argc, argv); }
