#include "aggfit/cli.hpp"

int main(int argc, char** argv) { return aggfit::cli_dispatch(argc, argv); }
