#include <basinforge/cli.hpp>

int main(int argc, char** argv) { return basinforge::parse_and_dispatch(argc, argv); }
