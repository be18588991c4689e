#include "dosc/cli/commands.hpp"

int main(int argc, char** argv) { return dosc::cli::main_entry(argc, argv); }
