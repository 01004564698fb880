#include "wayfind/cli.hpp"

int main(int argc, char** argv) { return wayfind::cli::dispatch(argc, argv); }
