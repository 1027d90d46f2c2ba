#include "jumps/cli.hpp"

int main(int argc, char** argv) { return jumps::cli::run(argc, argv); }
