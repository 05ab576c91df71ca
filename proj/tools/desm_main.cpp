#include "desm/cli.hpp"

int main(int argc, char** argv) { return desm::cli::run(argc, argv); }
