#include "tq/cli.hpp"

int main(int argc, char** argv) { return tq::cli::run(argc, argv); }
