#include "qdnet/cli/app.hpp"

int main(int argc, char** argv) { return qdnet::cli::run(argc, argv); }
