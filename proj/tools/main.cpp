#include "commands.hpp"

int main(int argc, char** argv) { return impsim::cli::run(argc, argv); }
