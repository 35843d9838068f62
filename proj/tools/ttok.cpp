#include "ttok/cli.hpp"

int main(int argc, char** argv) { return ttok::cli::run(argc, argv); }
