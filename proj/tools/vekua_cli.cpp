#include "vekua/cli_app.hpp"

int main(int argc, char** argv) { return vekua::cli::run(argc, argv); }
