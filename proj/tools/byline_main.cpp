#include "byline/cli.hpp"

int main(int argc, char** argv) { return byline::cli::run(argc, argv); }
