#include "marsupial/cli.hpp"

int main(int argc, char** argv) { return marsupial::cli::run(argc, argv); }
