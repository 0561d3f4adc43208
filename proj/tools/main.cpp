#include "cli_app.hpp"

int main(int argc, char** argv) { return hmdiv::cli::run(argc, argv); }
