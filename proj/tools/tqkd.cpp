#include "tqkd/cli.hpp"

int main(int argc, char** argv) { return tqkd::cli::run(argc, argv); }
