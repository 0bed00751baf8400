#include "cli.hpp"

int main(int argc, char** argv) { return labcli::dispatch(argc, argv); }
